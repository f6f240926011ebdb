import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridsolve.fd import Relop
from gridsolve.formula import (
    Add,
    AllDifferent,
    number_lit,
    CellRef,
    Count,
    DecLit,
    DomainLit,
    FloorDiv,
    IfThen,
    IntLit,
    Member,
    Mod,
    Mul,
    ParseError,
    Relation,
    Sub,
    Sublist,
    SumRel,
    SymbolLit,
    ValueRange,
    format_ast,
    format_formula,
    parse_cell_formula,
    parse_cell_ref,
)
from gridsolve.formula.parser import _CELL_SHAPE_RE, KEYWORDS

from corpus import ALL_STRINGS


def parse_one(text):
    asts = parse_cell_formula(text)
    assert len(asts) == 1, asts
    return asts[0]


def test_count_figure_string():
    got = parse_one("COUNT(0,[B3,C3,D3,E3],<,4)")
    assert got == Count(
        IntLit(0),
        tuple(CellRef(c, 3) for c in (2, 3, 4, 5)),
        Relop.LT,
        4,
    )


def test_domain_then_relation():
    got = parse_cell_formula("[0..9]; C3=D5")
    assert got == [
        DomainLit((ValueRange(IntLit(0), IntLit(9)),)),
        Relation(CellRef(3, 3), Relop.EQ, CellRef(4, 5)),
    ]


def test_mod_without_spaces():
    got = parse_one("B5=(B2+B3+B4)MOD10")
    b2, b3, b4, b5 = (CellRef(2, r) for r in (2, 3, 4, 5))
    assert got == Relation(b5, Relop.EQ, Mod(Add(Add(b2, b3), b4), IntLit(10)))


def test_decimals_are_exact_rationals():
    got = parse_one("[0,0.25,0.5,1]")
    assert got == DomainLit((IntLit(0), DecLit(1, 4), DecLit(1, 2), IntLit(1)))


def test_trailing_zero_decimal_normalizes():
    assert parse_one("B3=1.0") == Relation(CellRef(2, 3), Relop.EQ, IntLit(1))


def test_too_many_decimal_places():
    with pytest.raises(ParseError):
        parse_cell_formula("B3=0.1234567")


def test_frequency_alias_and_ne_alias():
    assert parse_one("FREQUENCY(0,[B3],=,1)") == parse_one("COUNT(0,[B3],=,1)")
    assert parse_one("B3<>C3") == parse_one("B3!=C3")


def test_keywords_case_insensitive():
    assert parse_one("alldifferent([B3,C3])") == parse_one("ALLDIFFERENT([B3,C3])")


def test_range_expansion_row_major():
    got = parse_one("ALLDIFFERENT([A1:B2])")
    assert got.cells == (
        CellRef(1, 1),
        CellRef(2, 1),
        CellRef(1, 2),
        CellRef(2, 2),
    )


def test_duplicates_preserved_in_cell_sets():
    got = parse_one("ALLDIFFERENT([B3,B3,C3])")
    assert got.cells == (CellRef(2, 3), CellRef(2, 3), CellRef(3, 3))


def test_absolute_refs():
    got = parse_one("COUNT(0,[$B$3,C3],<,4)")
    assert got.cells == (CellRef(2, 3, True, True), CellRef(3, 3))
    assert parse_one("$B3=B$4") == Relation(
        CellRef(2, 3, col_abs=True), Relop.EQ, CellRef(2, 4, row_abs=True)
    )


def test_symbols_vs_cell_refs():
    got = parse_one("B2=Morning")
    assert got == Relation(CellRef(2, 2), Relop.EQ, SymbolLit("Morning"))
    # in a domain literal, identifiers are always symbols
    assert parse_one("[Morning,Off]") == DomainLit(
        (SymbolLit("Morning"), SymbolLit("Off"))
    )


def test_empty_string_yields_no_constraints():
    assert parse_cell_formula("") == []
    assert parse_cell_formula("   ") == []
    assert parse_cell_formula(";;") == []


def test_unknown_function_rejected():
    with pytest.raises(ParseError) as err:
        parse_cell_formula("ALLDIF(B3,C3)")
    assert "ALLDIF" in str(err.value)
    assert "ALLDIFFERENT" in err.value.expected


def test_error_carries_position():
    with pytest.raises(ParseError) as err:
        parse_cell_formula("COUNT(")
    assert err.value.position == 6
    with pytest.raises(ParseError) as err:
        parse_cell_formula("B3=")
    assert err.value.position == 3


def test_relops_non_associative():
    with pytest.raises(ParseError):
        parse_cell_formula("B3<C3<D3")


def test_precedence_mod_over_plus():
    got = parse_one("B2+B3 MOD 10=0")
    b2, b3 = CellRef(2, 2), CellRef(2, 3)
    assert got == Relation(Add(b2, Mod(b3, IntLit(10))), Relop.EQ, IntLit(0))


def test_precedence_mul_div_left_assoc():
    got = parse_one("B1*2/3=0")
    assert got.lhs == FloorDiv(Mul(CellRef(2, 1), IntLit(2)), IntLit(3))


def test_sub_left_assoc_vs_parens():
    flat = parse_one("B3-C4-D5=0")
    grouped = parse_one("B3-(C4-D5)=0")
    b3, c4, d5 = CellRef(2, 3), CellRef(3, 4), CellRef(4, 5)
    assert flat.lhs == Sub(Sub(b3, c4), d5)
    assert grouped.lhs == Sub(b3, Sub(c4, d5))


def test_sum_only_eq_ne():
    assert parse_one("SUM([B3,B4])=1") == SumRel(
        (CellRef(2, 3), CellRef(2, 4)), Relop.EQ, IntLit(1)
    )
    with pytest.raises(ParseError):
        parse_cell_formula("SUM([B3,B4])<1")


def test_parse_cell_ref_helper():
    assert parse_cell_ref("B3") == CellRef(2, 3)
    assert parse_cell_ref("$AA$11") == CellRef(27, 11, True, True)
    with pytest.raises(ParseError):
        parse_cell_ref("3B")


def test_corpus_round_trip():
    assert len(ALL_STRINGS) >= 60
    for text in ALL_STRINGS:
        first = parse_cell_formula(text)
        rendered = format_formula(first)
        second = parse_cell_formula(rendered)
        assert second == first, text
        # formatting is a fixpoint after one pass
        assert format_formula(second) == rendered, text


def test_small_fuzz_never_crashes():
    rng = random.Random(99)
    alphabet = "B3C4[],;()<>=!+-*/ .$ABxyMODIFTHENSUM0129_"
    for _ in range(2000):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 30)))
        try:
            parse_cell_formula(text)
        except ParseError:
            pass


# -- property: format/parse round trip over generated ASTs -----------------

_KEYWORD_BLOCK = {k.lower() for k in KEYWORDS}


def _is_symbol_name(name: str) -> bool:
    return name.lower() not in _KEYWORD_BLOCK and not _CELL_SHAPE_RE.match(name)


symbols = st.from_regex(r"[A-Za-z][A-Za-z0-9_]{0,8}", fullmatch=True).filter(
    _is_symbol_name
)
int_lits = st.integers(-999, 999).map(IntLit)
dec_lits = st.builds(
    lambda n, k: number_lit(Fraction(n, 10**k)),
    st.integers(-9999, 9999),
    st.integers(1, 6),
).filter(lambda v: isinstance(v, DecLit))
values = st.one_of(int_lits, dec_lits, symbols.map(SymbolLit))
cell_refs = st.builds(
    CellRef,
    st.integers(1, 60),
    st.integers(1, 60),
    st.booleans(),
    st.booleans(),
)
cell_sets = st.lists(cell_refs, min_size=1, max_size=5).map(tuple)

exprs = st.recursive(
    st.one_of(int_lits, dec_lits, cell_refs),
    lambda children: st.one_of(
        st.builds(Add, children, children),
        st.builds(Sub, children, children),
        st.builds(Mul, children, children),
        st.builds(FloorDiv, children, children),
        st.builds(Mod, children, children),
    ),
    max_leaves=6,
)
relops = st.sampled_from(list(Relop))
relations = st.builds(Relation, exprs, relops, exprs)

constraints = st.one_of(
    st.builds(
        DomainLit,
        st.lists(
            st.one_of(values, st.builds(ValueRange, int_lits, int_lits)),
            min_size=1,
            max_size=4,
        ).map(tuple),
    ),
    relations,
    st.builds(AllDifferent, cell_sets),
    st.builds(Member, values, cell_sets),
    st.builds(Count, values, cell_sets, relops, st.integers(-10, 10)),
    st.builds(Sublist, st.lists(values, min_size=1, max_size=3).map(tuple), cell_sets),
    st.builds(IfThen, relations, relations),
    st.builds(SumRel, cell_sets, st.sampled_from([Relop.EQ, Relop.NE]), values),
)


@settings(max_examples=300)
@given(constraints)
def test_generated_ast_round_trip(ast):
    text = format_ast(ast)
    assert parse_cell_formula(text) == [ast]
