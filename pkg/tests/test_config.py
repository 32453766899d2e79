import pytest

from poissonlab import (BooleMap, ConfigError, IntegerTranslation,
                        RankOneTower)
from poissonlab.config import (KeyValueConfig, build_joining_spec,
                               build_system, named_sets)


def parse(text):
    return KeyValueConfig.parse(text)


def test_parse_basic():
    cfg = parse("""
    # experiment description
    system = boole
    set = [0,1) [2,3.5)
    trials = 500
    lags = 0..4
    epsilon = 0.25
    """)
    assert cfg.get_str("system") == "boole"
    assert cfg.get_int("trials") == 500
    assert cfg.get_int_list("lags") == [0, 1, 2, 3, 4]
    assert cfg.get_float("epsilon") == 0.25
    assert cfg.get_set().intervals == ((0.0, 1.0), (2.0, 3.5))


def test_parse_errors_carry_line_and_key():
    with pytest.raises(ConfigError) as err:
        parse("system = boole\nset = [1,0)").get_set()
    assert "line 2" in str(err.value) and "set" in str(err.value)
    with pytest.raises(ConfigError) as err:
        parse("set = [0,2) [1,3)").get_set()
    assert "overlap" in str(err.value)
    with pytest.raises(ConfigError) as err:
        parse("mystery_key = 3")
    assert "unknown key" in str(err.value)
    with pytest.raises(ConfigError):
        parse("trials = 5\ntrials = 6")
    with pytest.raises(ConfigError):
        parse("just words without equals")
    with pytest.raises(ConfigError) as err:
        parse("trials = many")
    assert "integer" in str(err.value)


def test_build_systems():
    assert isinstance(build_system(parse("system = boole")), BooleMap)
    tr = build_system(parse("system = translation\ntranslation.step = -2"))
    assert isinstance(tr, IntegerTranslation) and tr.step == -2
    tower = build_system(parse(
        "system = rankone\nrankone.cuts = 2 3\n"
        "rankone.spacers.0 = 0 1\nrankone.spacers.1 = 0 0 2\n"
        "rankone.base_width = 2.0"))
    assert isinstance(tower, RankOneTower)
    assert tower.state.stage_heights == [1, 3, 11]
    with pytest.raises(ConfigError):
        build_system(parse("system = lorenz"))
    with pytest.raises(ConfigError):
        build_system(parse("system = rankone\nrankone.cuts = 1"))
    with pytest.raises(ConfigError):
        build_system(parse("trials = 3"))


def test_build_joining_spec():
    spec = build_joining_spec(parse(
        "joining.a = 0.5\njoining.a_prime = 0.5\njoining.c.0 = 0.25\n"
        "joining.c.-1 = 0.25"))
    spec.validate()
    assert spec.coupled.weights == ((-1, 0.25), (0, 0.25))
    thinned = build_joining_spec(parse(
        "joining.a = 0\njoining.a_prime = 0.5\njoining.c.1 = 1.0\n"
        "joining.y_retention = 0.5"))
    thinned.validate()


def test_named_sets():
    sets = named_sets(parse("set = [0,1)\nset.B = [1,2)"))
    assert set(sets) == {"set", "B"}
    assert sets["B"].intervals == ((1.0, 2.0),)
