from support import Scene

from xtt.conversion import Conversion

PATHS = "(A : U) (a b : El A) (p q : path (_. El A) a b)"


def test_reflexive_and_beta_conversion():
    s = Scene(telescope="(x : bool)")
    assert s.conv("bool", "x", "x")
    assert s.conv("bool", r"(\y. y : bool -> bool) x", "x")
    assert not s.conv("bool", "tt", "ff")
    assert not s.conv("bool", "x", "tt")


def test_eta_for_functions_pairs_and_paths():
    s = Scene(telescope="(f : bool -> bool) (p : bool * bool) (a b : bool) (q : path (_. bool) a b)")
    assert s.conv("bool -> bool", "f", r"\x. f x")
    assert s.conv("bool * bool", "p", "(p.1, p.2)")
    assert s.conv("path (_. bool) a b", "q", "<i> q @ i")


def test_any_two_parallel_paths_are_equal():
    s = Scene(telescope=PATHS)
    assert s.conv("path (_. El A) a b", "p", "q")


def test_paths_between_parallel_paths_are_equal():
    s = Scene(
        telescope=PATHS + " (u v : path (_. path (_. El A) a b) p q)"
    )
    assert s.conv("path (_. path (_. El A) a b) p q", "u", "v")


def test_types_with_equal_codes():
    s = Scene()
    assert s.conv_types("El (pi^ bool^ (_. bool^))", "bool -> bool")
    assert s.conv_types("El (sg^ bool^ (_. bool^))", "bool * bool")
    assert not s.conv_types("bool -> bool", "bool * bool")


def test_codes_compare_structurally():
    s = Scene()
    assert s.conv("U", "pi^ bool^ (_. bool^)", "pi^ bool^ (x. bool^)")
    assert not s.conv("U", "pi^ bool^ (_. bool^)", "sg^ bool^ (_. bool^)")


def test_trans_is_strictly_associative():
    s = Scene(telescope="(A : U) (a b c d : El A) (p : path (_. El A) a b) "
              "(q : path (_. El A) b c) (r : path (_. El A) c d)")
    assert s.conv(
        "path (_. El A) a d",
        "trans A a b d p (trans A b c d q r)",
        "trans A a c d (trans A a b c p q) r",
    )


def test_inverse_law_holds_strictly():
    s = Scene(telescope="(A : U) (a b : El A) (p : path (_. El A) a b)")
    assert s.conv("path (_. El A) b b", "trans A b a b (sym A a b p) p", "<_> b")


def test_split_terms_compare_branchwise():
    s = Scene(dims="i", formulas=["dd i"])
    assert s.conv("bool", "[ i = 0 -> tt | i = 1 -> ff ]", "[ i = 1 -> ff | i = 0 -> tt ]")
    assert not s.conv("bool", "[ i = 0 -> tt | i = 1 -> ff ]", "[ i = 0 -> tt | i = 1 -> tt ]")


def test_zero_split_budget_is_undecided():
    s = Scene(telescope=PATHS)
    conv = Conversion(max_splits=0)
    t = s.type("path (_. El A) a b")
    assert not conv.equal_values(s.cx, t, s.value("p", "path (_. El A) a b"),
                                 s.value("q", "path (_. El A) a b"))
    assert conv.undecided


def test_conversion_is_memoized_and_repeatable():
    s = Scene(telescope=PATHS)
    conv = Conversion()
    t = s.type("path (_. El A) a b")
    p, q = s.value("p", "path (_. El A) a b"), s.value("q", "path (_. El A) a b")
    assert conv.equal_values(s.cx, t, p, q)
    assert conv.equal_values(s.cx, t, p, q)
    assert not conv.undecided
