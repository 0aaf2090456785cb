from __future__ import annotations

import pytest

from drinfeld_reciprocity.config import build_module, parse_config_text
from drinfeld_reciprocity.server import CONTEXTS

CARLITZ_Q2 = """
field.p = 2
module.rho_pi[0][1] = 1
module.rho_pi[1][0] = 1
run.levels = 3
run.samples = 3
"""

CARLITZ_Q3 = """
field.p = 3
module.rho_pi[0][1] = 1
module.rho_pi[1][0] = 1
prec.pi = 24
prec.tau = 12
run.levels = 2
run.samples = 3
"""

# ρ_π = π + (1 + π)τ
TWISTED_Q2 = """
field.p = 2
module.rho_pi[0][1] = 1
module.rho_pi[1][0] = 1
module.rho_pi[1][1] = 1
run.levels = 2
run.samples = 3
"""

# ρ_π = π + τ + πτ², whose r_1 has τ terms
TWISTED_TAU_Q2 = """
field.p = 2
module.rho_pi[0][1] = 1
module.rho_pi[1][0] = 1
module.rho_pi[2][1] = 1
prec.pi = 24
prec.tau = 12
run.levels = 2
run.samples = 2
"""


@pytest.fixture(scope="session")
def carlitz_q2_config():
    return parse_config_text(CARLITZ_Q2)


@pytest.fixture(scope="session")
def carlitz_q2(carlitz_q2_config):
    return CONTEXTS.get_or_build(carlitz_q2_config)


@pytest.fixture(scope="session")
def carlitz_q3():
    return build_module(parse_config_text(CARLITZ_Q3))


@pytest.fixture(scope="session")
def twisted_q2_config():
    return parse_config_text(TWISTED_Q2)


@pytest.fixture(scope="session")
def twisted_q2(twisted_q2_config):
    return build_module(twisted_q2_config)


@pytest.fixture(scope="session")
def twisted_tau_q2():
    return build_module(parse_config_text(TWISTED_TAU_Q2))


@pytest.fixture(scope="session")
def field_q2(carlitz_q2):
    return carlitz_q2.field


@pytest.fixture(scope="session")
def pi(field_q2):
    from drinfeld_reciprocity.laurent import LaurentNum

    return LaurentNum.pi_power(field_q2)
