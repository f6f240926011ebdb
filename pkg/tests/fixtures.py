"""Shared paper-derived fixtures."""

# The published TA-assignment solution grid (columns B..E are TAs 1..4,
# rows 3..8 are courses 1..6), as display values.
FIG9_TA_SOLUTION = {
    "B3": "0", "C3": "0", "D3": "0", "E3": "0.25",
    "B4": "0", "C4": "0", "D4": "0.25", "E4": "0",
    "B5": "0", "C5": "0.25", "D5": "0", "E5": "0",
    "B6": "0", "C6": "0.25", "D6": "0", "E6": "0",
    "B7": "0", "C7": "0.5", "D7": "0.25", "E7": "0.25",
    "B8": "1", "C8": "0", "D8": "0.5", "E8": "0.5",
}

# The unique SEND+MORE=MONEY digits by grid cell.
SENDMORY_DIGITS = {
    "B3": "9", "C3": "5", "D3": "6", "E3": "7",   # S E N D
    "B4": "1", "C4": "0", "D4": "8", "E4": "5",   # M O R E
    "A5": "1", "B5": "0", "C5": "6", "D5": "5", "E5": "2",  # M O N E Y
    "B2": "0", "C2": "1", "D2": "1", "E2": "0",   # carries
}
