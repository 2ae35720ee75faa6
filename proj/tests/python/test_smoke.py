import pytest

projtrac = pytest.importorskip("projtrac")

MINIMAL = """
[model]
name = minkowski
chart = spacelike
n = 4
[run]
order = 3
homogeneous = false
[anchors]
p = 1.2, 0.8, 0.9, 1.1
"""


def test_minimal_config_passes():
    report = projtrac.verify(MINIMAL)
    assert report["pass"]
    assert report["summary"]["failed"] == 0
    assert [c["anchor"] for c in report["checks"]][0] == "p"


def test_reports_are_deterministic():
    cfg = projtrac.parse_config(MINIMAL)
    assert projtrac._core.verify(cfg) == projtrac._core.verify(cfg)


def test_expand_chi_leading_term():
    cfg = projtrac.parse_config("[anchors]\nscri = 0, 0.6, 1.0, 1.3\n")
    nu = projtrac.expand(cfg, "nu", 0)["rows"][0][3]
    rows = projtrac.expand(cfg, "chi", 1)["rows"]
    y = [r for r in rows if r[0] == "Y" and r[1] == -1]
    assert y and y[0][3] == pytest.approx(-0.5 / nu, rel=1e-12)


def test_orbits():
    assert projtrac.orbit(3, ["0", "1/2", "1", "0", "0"]) == ("Spi", "dS")
    assert projtrac.orbit(3, ["1", "0", "0", "0", "1"]) == ("interior-line", "Minkowski")


def test_errors():
    with pytest.raises(projtrac.ProjtracError, match="ConfigParseError"):
        projtrac.parse_config("[run]\norder = 1\n[anchors]\np = 1,1,1,1\n")
    with pytest.raises(projtrac.ProjtracError, match="UnknownQuantity"):
        projtrac.expand(projtrac.parse_config(MINIMAL), "kappa", 1)
    with pytest.raises(projtrac.ProjtracError, match="RemovedPoint"):
        projtrac.orbit(3, ["1", "0", "0", "0", "0"])
