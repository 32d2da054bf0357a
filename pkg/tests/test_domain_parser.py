import pytest

from config.constants import ActionKind, FluentKind
from errors import DomainError
from kb.domain import Literal
from kb.parser import parse_domain
from kb.restaurant import build_domain, load_schema
from kb.terms import Term, parse_term, term
from tests.helpers import ground

MICRO = """
sort obj
instance o1 obj
instance o2 obj
var X obj
fluent p(obj) inertial physical
fluent q(obj) inertial physical
fluent r(obj) defined physical
action a(obj) exogenous
causes a(X) -> p(X), -q(X) if -p(X)
causes a(X) -> q(X) default
if r(X) <- p(X), -q(X)
impossible_if a(X) <- q(X)
"""


class TestTerms:
    def test_parse_and_print(self):
        t = parse_term("order(nicole, lentil_soup, waitress)")
        assert t == term("order", "nicole", "lentil_soup", "waitress")
        assert str(t) == "order(nicole,lentil_soup,waitress)"

    def test_nested(self):
        t = parse_term("start(nicole,c_act(nicole,veg_r,waitress,lentil_soup))")
        assert t.args[1].name == "c_act"
        assert t.args[1].arity == 4

    def test_variables_and_substitution(self):
        t = parse_term("go(C, R)")
        assert list(t.variables()) == ["C", "R"]
        assert not t.is_ground
        ground_t = t.substitute({"C": Term("nicole"), "R": Term("veg_r")})
        assert ground_t == term("go", "nicole", "veg_r")
        assert ground_t.is_ground

    def test_open_slot(self):
        t = parse_term("pay(?,b)")
        assert t.args[0].is_open_slot

    def test_malformed(self):
        with pytest.raises(ValueError):
            parse_term("go(nicole,")


class TestParseDomain:
    def test_statements(self):
        schema = parse_domain(MICRO)
        assert schema.sorts == {"obj": None}
        assert set(schema.instances) == {"o1", "o2"}
        assert schema.fluent_decls["r"].kind == FluentKind.DEFINED
        assert schema.action_decls["a"].kind == ActionKind.EXOGENOUS
        assert len(schema.causes) == 2
        assert schema.causes[1].defeasible
        assert len(schema.definitions) == 1
        assert len(schema.impossible) == 1

    def test_unknown_statement_has_location(self):
        with pytest.raises(DomainError) as e:
            parse_domain("sort obj\n  bogus thing\n", source="x.domain")
        assert e.value.line == 2
        assert e.value.column == 3
        assert str(e.value).startswith("x.domain:2:3:")

    def test_malformed_statement(self):
        with pytest.raises(DomainError) as e:
            parse_domain("sort obj\nfluent p(obj) sometimes physical\n")
        assert e.value.line == 2

    def test_component_outside_activity(self):
        with pytest.raises(DomainError, match="outside an activity"):
            parse_domain("component 1 go(C, R)\n")

    def test_duplicate_component(self):
        text = "activity act(X)\n  component 1 a(X)\n  component 1 a(X)\n"
        with pytest.raises(DomainError, match="Duplicate component"):
            parse_domain(text)

    def test_duplicate_declaration(self):
        with pytest.raises(DomainError, match="already declared"):
            parse_domain("sort obj\nsort obj\n")


class TestGrounding:
    def test_ground_laws(self):
        d = ground(MICRO)
        assert d.fluents == {term("p", "o1"), term("p", "o2"), term("q", "o1"),
                             term("q", "o2"), term("r", "o1"), term("r", "o2")}
        assert d.actions == {term("a", "o1"), term("a", "o2")}
        heads = {law.head for law in d.dynamic_laws if law.triggers == (term("a", "o1"),)}
        assert heads == {Literal(term("p", "o1")), Literal(term("q", "o1"), False), Literal(term("q", "o1"))}
        assert d.inertial == {term("p", "o1"), term("p", "o2"), term("q", "o1"), term("q", "o2")}

    def test_undeclared_variable(self):
        with pytest.raises(DomainError, match="Undeclared variable"):
            ground(MICRO + "causes a(Y) -> p(Y)\n")

    def test_unknown_sort(self):
        with pytest.raises(DomainError, match="unknown sort"):
            ground("sort obj\ninstance o1 thing\n")

    def test_arity_mismatch(self):
        with pytest.raises(DomainError, match="expects 1 arguments"):
            ground(MICRO + "causes a(X) -> p(X, X)\n")

    def test_only_inertial_fluents_are_caused(self):
        with pytest.raises(DomainError, match="Only inertial"):
            ground(MICRO + "causes a(X) -> r(X)\n")

    def test_negative_definition_cycle(self):
        text = MICRO + "fluent s(obj) defined physical\nif s(X) <- -r(X)\nif r(X) <- s(X)\n"
        with pytest.raises(DomainError, match="negatively"):
            ground(text)

    def test_positive_definition_cycle_is_fine(self):
        text = MICRO + "fluent s(obj) defined physical\nif s(X) <- r(X)\nif r(X) <- s(X)\n"
        assert ground(text).strata

    def test_agent_action_needs_actor(self):
        with pytest.raises(DomainError, match="actor"):
            ground(MICRO + "action b(obj) agent\n")

    def test_cyclic_activity_nesting(self):
        text = MICRO + (
            "sort agent\ninstance ag agent\nvar A agent\n"
            "action b(agent) agent actor=1\n"
            "activity one(A)\n  actor A\n  goal p(o1)\n  component 1 two(A)\n"
            "activity two(A)\n  actor A\n  goal p(o2)\n  component 1 one(A)\n"
        )
        with pytest.raises(DomainError, match="cyclic"):
            ground(text)

    def test_reserved_names(self):
        with pytest.raises(DomainError, match="reserved"):
            ground(MICRO + "action start(obj) exogenous\n")


class TestRestaurantDomain:
    def test_schema_loads(self):
        schema = load_schema()
        assert schema.required == ["customer"]
        assert schema.fluent_decls["at_loc"].functional == 2
        assert len(schema.activities) == 5

    def test_grounded_sizes(self, domain):
        assert domain.agents == {Term("nicole"), Term("waitress"), Term("cook1")}
        assert term("go", "nicole", "veg_r") in domain.actions
        assert term("select", "nicole", term("satiated_and_out", "nicole")) in domain.actions
        assert domain.is_mental(term("wait", "nicole"))
        assert domain.is_exogenous(Term("interference"))
        assert domain.actors[term("lead_to", "waitress", "nicole", "t")] == (Term("waitress"), Term("nicole"))

    def test_members_include_sub_sorts(self, domain):
        assert domain.members("person") == ["cook1", "nicole", "waitress"]
        assert domain.members("waiter") == ["waitress"]
        assert "lentil_soup" in domain.members("locatable")
        assert domain.members("no_such_sort") == []

    def test_duplicate_instance(self):
        with pytest.raises(DomainError, match="Duplicate instance"):
            build_domain({"nicole": "customer", "m": "menu"})
