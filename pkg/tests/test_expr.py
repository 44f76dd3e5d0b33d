import pytest

from kronhall.expr import ExpressionError, builder, evaluate, tokenize
from kronhall.generators import Generators
from kronhall.hall import HallAlgebra
from kronhall.qeps import QEps


@pytest.fixture(scope="module")
def g():
    return Generators(HallAlgebra(2))


def test_atoms(g):
    assert evaluate("mu1", g) == g.mu(1)
    assert evaluate("rho 2", g) == g.rho(2)
    assert evaluate("Theta0", g) == g.theta(0)
    assert evaluate("ThetaDiv(0,2)", g) == g.named("ThetaDiv", 0, 2).element
    assert evaluate("schur(2,1)", g) == g.schur((2, 1))


def test_arithmetic(g):
    t0, t1 = g.theta(0), g.theta(1)
    expected = g.alg.product(t0, t1) - g.alg.product(t1, t0).scale(g.e(-2))
    assert evaluate("theta0*theta1 - e^-2*theta1*theta0", g) == expected
    assert evaluate("eps^-2 * theta1 * theta0", g) == g.alg.product(t1, t0).scale(g.e(-2))
    assert evaluate("3/4*rho1", g) == g.rho(1).scale(QEps(2, 3) / 4)
    assert evaluate("-(rho1 + rho1)", g) == g.rho(1).scale(-2)


def test_scalar_only_is_a_multiple_of_unit(g):
    assert evaluate("2 + 1/2", g) == g.alg.unit().scale(QEps(2, 5) / 2)


def test_precedence(g):
    a = evaluate("rho1 + rho1*rho1", g)
    b = evaluate("rho1 + (rho1*rho1)", g)
    assert a == b
    assert a != evaluate("(rho1 + rho1)*rho1", g)


@pytest.mark.parametrize("text", ["mu", "mu1 +", "foo3", "mu1)", "rho1 $ rho2", "e^", "gamma(-1)", "phi0"])
def test_errors(g, text):
    with pytest.raises(ExpressionError):
        evaluate(text, g)


def test_builder_validates_tokens_eagerly():
    with pytest.raises(ExpressionError):
        builder("rho1 ? 2")
    assert tokenize("mu1*mu0") == [("name", "mu"), ("int", "1"), ("op", "*"), ("name", "mu"), ("int", "0")]
