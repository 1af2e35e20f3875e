"""Scenario files: one JSON document per verification target.

Forms, maps, and matrices serialize to their expression sources, so an
exported scenario can be edited by hand and re-run. Loading validates
structure, expression syntax, and declared dimensions up front; problems
surface as ScenarioFormatError, which the command line maps to exit code 2.

Named probes are code, not data. A loaded file whose name matches a built-in
scenario gets that scenario's probes reattached so its expected table stays
fully checkable; under any other name the probe rows are dropped and the
pipeline rows remain.
"""

import json

import numpy as np

from .action import GroupAction, LieAlgebraSpec, MomentumData
from .calculus import DiffeoMap, KForm, VectorField
from .contact import CircleBridge, ContactStructure, ContactWitness, lcs_from_contact
from .errors import LcslabError, ScenarioFormatError
from .expr import ScalarField
from .gallery import ExampleScenario, ExpectedCheck, load_example, registry_names
from .lck import LckQuotientWitness, LckStructure, MatrixField
from .lcs import LcsStructure
from .manifold import ConstrainedManifold
from .reduction import QuotientWitness

FORMAT_VERSION = 1


# -- serialization ----------------------------------------------------------

def form_to_dict(a: KForm) -> dict:
    return {
        "degree": a.degree,
        "coefficients": {
            ",".join(str(i) for i in idx): field.source()
            for idx, field in sorted(a.coeffs.items())
        },
    }


def matrix_to_rows(m: MatrixField) -> list:
    return [[entry.source() for entry in row] for row in m.entries]


def field_to_sources(x: VectorField) -> list:
    return [c.source() for c in x.components]


def map_to_sources(phi: DiffeoMap) -> list:
    return [c.source() for c in phi.components]


def _manifold_block(manifold: ConstrainedManifold) -> dict:
    return {"ambient_dim": manifold.ambient_dim,
            "constraints": [c.source() for c in manifold.constraints]}


def _witnesses_block(scn: ExampleScenario) -> dict:
    out = {}
    if scn.witness is not None and scn.kind == "lcs":
        w = scn.witness
        out["quotient"] = {
            "projection": map_to_sources(w.projection),
            "target": _manifold_block(w.reduced.manifold),
            "omega": form_to_dict(w.reduced.omega),
            "theta": form_to_dict(w.reduced.theta),
            "gauge": w.gauge.source(),
        }
    if scn.witness is not None and scn.kind == "contact":
        w = scn.witness
        out["contact"] = {
            "projection": map_to_sources(w.projection),
            "target": _manifold_block(w.reduced.manifold),
            "alpha": form_to_dict(w.reduced.alpha),
        }
    if scn.lck_witness is not None:
        w = scn.lck_witness
        out["lck"] = {
            "j": matrix_to_rows(w.j_reduced),
            "g": matrix_to_rows(w.g_reduced),
            "vaisman": w.vaisman,
        }
    if scn.witness_keep is not None:
        out["keep"] = {"block": [int(i) for i in scn.witness_keep["block"]],
                       "floor": float(scn.witness_keep["floor"])}
    return out


def scenario_to_dict(scn: ExampleScenario) -> dict:
    data = {
        "version": FORMAT_VERSION,
        "name": scn.name,
        "description": scn.description,
        "kind": scn.kind,
        "ambient_dim": scn.dim,
        "constraints": [c.source() for c in scn.manifold.constraints],
        "forms": {},
        "fields": {name: field_to_sources(x)
                   for name, x in sorted(scn.holomorphic_fields.items())},
        "action": None,
        "algebra": None,
        "momentum": None,
        "values": {"xi": [[float(v) for v in x] for x in scn.xi_values],
                   "path": [[float(v) for v in x] for x in scn.xi_path]},
        "gauges": [],
        "witnesses": _witnesses_block(scn),
        "lck": {},
        "tolerances": {k: float(v) for k, v in sorted(scn.tolerances.items())},
        "samples": {"count": scn.sample_count, "seed": 0,
                    "radius": scn.sample_radius},
        "options": {
            "use_gauge_for_reduction": scn.use_gauge_for_reduction,
            "run_average": scn.run_average,
            "extras": list(scn.extras),
        },
        "expected": [{"check": e.check_id, "value": e.value, "basis": e.basis,
                      "tol": e.tol} for e in scn.expected],
    }

    if scn.bridge is not None:
        data["options"]["bridge"] = {
            "scale": float(scn.bridge.scale),
            "contact": _manifold_block(scn.bridge.contact.manifold),
            "alpha": form_to_dict(scn.bridge.contact.alpha),
        }
    elif scn.kind == "lcs":
        data["forms"]["omega"] = form_to_dict(scn.structure.omega)
        data["forms"]["theta"] = form_to_dict(scn.structure.theta)
    else:
        data["forms"]["alpha"] = form_to_dict(scn.structure.alpha)
    for name, form in sorted(scn.aux_forms.items()):
        data["forms"][name] = form_to_dict(form)

    if scn.action is not None:
        act = scn.action
        data["action"] = {
            "flows": [map_to_sources(flow) for flow in act.flows],
            "cocycles": [c.source() for c in act.flow_cocycles],
            "elements": [[[int(i), float(t)] for i, t in e.factors]
                         for e in act.elements],
            "torus_rank": act.torus_rank,
        }
        data["algebra"] = {
            "dim": act.algebra.dim,
            "structure_constants": act.algebra.structure_constants.tolist(),
        }
    if scn.momentum is not None:
        data["momentum"] = {"rho": [r.source() for r in scn.momentum.rho]}

    if scn.gauge is not None:
        data["gauges"].append({"f": scn.gauge.source(), "role": "active"})
    for g in scn.gauge_path:
        data["gauges"].append({"f": g.source(), "role": "sweep"})

    if scn.lck is not None:
        data["lck"]["j"] = matrix_to_rows(scn.lck.j)
        data["lck"]["g"] = matrix_to_rows(scn.lck.g)
        data["lck"]["vaisman"] = scn.vaisman
    if scn.sasaki_metric is not None:
        data["lck"]["sasaki_metric"] = matrix_to_rows(scn.sasaki_metric)
    return data


# -- parsing ----------------------------------------------------------------

def _fail(message: str) -> ScenarioFormatError:
    return ScenarioFormatError(message)


def _expect(condition: bool, message: str):
    if not condition:
        raise _fail(message)


def _get(data: dict, key: str, kinds, where: str):
    _expect(key in data, f"{where}: missing key '{key}'")
    value = data[key]
    _expect(isinstance(value, kinds), f"{where}: key '{key}' has the wrong type")
    return value


def _parse_scalar(source, dim: int, where: str) -> ScalarField:
    _expect(isinstance(source, str), f"{where}: expected an expression string")
    try:
        return ScalarField.from_source(source, dim)
    except LcslabError as err:
        raise _fail(f"{where}: {err}") from err


def form_from_dict(data: dict, dim: int, where: str) -> KForm:
    degree = _get(data, "degree", int, where)
    raw = _get(data, "coefficients", dict, where)
    coeffs = {}
    for key, source in raw.items():
        parts = tuple(int(p) for p in key.split(",")) if key else ()
        coeffs[parts] = _parse_scalar(source, dim, f"{where}[{key}]")
    try:
        return KForm(degree, dim, coeffs)
    except LcslabError as err:
        raise _fail(f"{where}: {err}") from err


def matrix_from_rows(rows, dim: int, where: str) -> MatrixField:
    _expect(isinstance(rows, list) and len(rows) == dim
            and all(isinstance(r, list) and len(r) == dim for r in rows),
            f"{where}: expected a {dim} by {dim} array of expressions")
    return MatrixField([[_parse_scalar(e, dim, where) for e in row]
                        for row in rows])


def field_from_sources(sources, dim: int, where: str) -> VectorField:
    _expect(isinstance(sources, list) and len(sources) == dim,
            f"{where}: expected {dim} component expressions")
    return VectorField([_parse_scalar(s, dim, where) for s in sources])


def map_from_sources(sources, dim: int, where: str) -> DiffeoMap:
    _expect(isinstance(sources, list) and sources,
            f"{where}: expected component expressions")
    return DiffeoMap([_parse_scalar(s, dim, where) for s in sources], dim)


def _manifold_from(block: dict, where: str) -> ConstrainedManifold:
    dim = _get(block, "ambient_dim", int, where)
    _expect(dim > 0, f"{where}: ambient_dim must be positive")
    constraints = _get(block, "constraints", list, where)
    return ConstrainedManifold(
        dim, [_parse_scalar(c, dim, f"{where}.constraints") for c in constraints])


def _xi_list(raw, where: str):
    _expect(isinstance(raw, list), f"{where}: expected a list of value vectors")
    out = []
    for row in raw:
        _expect(isinstance(row, list) and row, f"{where}: empty value vector")
        out.append(np.asarray([float(v) for v in row]))
    return out


def scenario_from_dict(data: dict) -> ExampleScenario:
    _expect(isinstance(data, dict), "scenario: top level must be an object")
    version = _get(data, "version", int, "scenario")
    _expect(version == FORMAT_VERSION,
            f"scenario: format version {version} is not supported")
    name = _get(data, "name", str, "scenario")
    kind = _get(data, "kind", str, "scenario")
    _expect(kind in ("lcs", "contact"), f"scenario: unknown kind '{kind}'")
    dim = _get(data, "ambient_dim", int, "scenario")
    _expect(dim > 0, "scenario: ambient_dim must be positive")

    manifold = _manifold_from({"ambient_dim": dim,
                               "constraints": _get(data, "constraints", list,
                                                   "scenario")},
                              "scenario")
    forms = {fname: form_from_dict(block, dim, f"forms.{fname}")
             for fname, block in _get(data, "forms", dict, "scenario").items()}

    options = data.get("options", {})
    _expect(isinstance(options, dict), "scenario: options must be an object")
    kw = {"sample_count": 24, "sample_radius": 1.5}

    bridge_block = options.get("bridge")
    if bridge_block is not None:
        _expect(kind == "lcs", "scenario: bridge construction needs kind lcs")
        cm = _manifold_from(_get(bridge_block, "contact", dict, "options.bridge"),
                            "options.bridge.contact")
        alpha = form_from_dict(_get(bridge_block, "alpha", dict, "options.bridge"),
                               cm.ambient_dim, "options.bridge.alpha")
        try:
            bridge = lcs_from_contact(ContactStructure(alpha, cm),
                                      scale=float(bridge_block.get("scale", 1.0)))
        except LcslabError as err:
            raise _fail(f"options.bridge: {err}") from err
        _expect(bridge.structure.dim == dim,
                "options.bridge: product dimension does not match ambient_dim")
        structure = LcsStructure(bridge.structure.omega, bridge.structure.theta,
                                 manifold)
        kw["bridge"] = bridge
    elif kind == "lcs":
        _expect("omega" in forms and "theta" in forms,
                "scenario: kind lcs needs forms omega and theta")
        try:
            structure = LcsStructure(forms["omega"], forms["theta"], manifold)
        except LcslabError as err:
            raise _fail(f"scenario: {err}") from err
    else:
        _expect("alpha" in forms, "scenario: kind contact needs form alpha")
        try:
            structure = ContactStructure(forms["alpha"], manifold)
        except LcslabError as err:
            raise _fail(f"scenario: {err}") from err
    kw["aux_forms"] = {fname: form for fname, form in forms.items()
                       if fname not in ("omega", "theta", "alpha")}

    action_block = data.get("action")
    if action_block is not None:
        algebra_block = _get(data, "algebra", dict, "scenario")
        try:
            algebra = LieAlgebraSpec(_get(algebra_block, "structure_constants",
                                          list, "algebra"))
        except LcslabError as err:
            raise _fail(f"algebra: {err}") from err
        _expect(algebra.dim == _get(algebra_block, "dim", int, "algebra"),
                "algebra: declared dim does not match the structure constants")
        flows = [map_from_sources(row, dim, f"action.flows[{i}]")
                 for i, row in enumerate(_get(action_block, "flows", list,
                                              "action"))]
        _expect(all(len(f.components) == dim for f in flows),
                "action: each flow needs one component per ambient coordinate")
        cocycles = [_parse_scalar(c, dim, "action.cocycles")
                    for c in _get(action_block, "cocycles", list, "action")]
        rank = action_block.get("torus_rank")
        try:
            act = GroupAction(algebra, flows, cocycles,
                              torus_rank=None if rank is None else int(rank))
        except LcslabError as err:
            raise _fail(f"action: {err}") from err
        for factors in action_block.get("elements", ()):
            _expect(isinstance(factors, list) and factors,
                    "action.elements: each element needs exponential factors")
            element = act.element_at(int(factors[0][0]), float(factors[0][1]))
            for i, t in factors[1:]:
                element = act.compose_elements(
                    element, act.element_at(int(i), float(t)))
            act.elements = act.elements + (element,)
        kw["action"] = act

    momentum_block = data.get("momentum")
    if momentum_block is not None:
        _expect("action" in kw, "momentum: needs an action")
        rho = _get(momentum_block, "rho", list, "momentum")
        _expect(len(rho) == kw["action"].algebra.dim,
                "momentum: one component per algebra generator")
        kw["momentum"] = MomentumData(
            [_parse_scalar(r, dim, "momentum.rho") for r in rho])

    values = data.get("values", {})
    _expect(isinstance(values, dict), "scenario: values must be an object")
    kw["xi_values"] = _xi_list(values.get("xi", []), "values.xi")
    kw["xi_path"] = _xi_list(values.get("path", []), "values.path")
    k = kw["action"].algebra.dim if "action" in kw else 0
    for label in ("xi_values", "xi_path"):
        _expect(all(len(x) == k for x in kw[label]),
                f"values: entries must have {k} components to match the algebra")

    gauges = data.get("gauges", [])
    _expect(isinstance(gauges, list), "scenario: gauges must be a list")
    path = []
    for i, entry in enumerate(gauges):
        _expect(isinstance(entry, dict), f"gauges[{i}]: expected an object")
        f = _parse_scalar(_get(entry, "f", str, f"gauges[{i}]"), dim,
                          f"gauges[{i}].f")
        role = entry.get("role", "sweep")
        if role == "active":
            _expect("gauge" not in kw, "gauges: more than one active gauge")
            kw["gauge"] = f
        else:
            _expect(role == "sweep", f"gauges[{i}]: unknown role '{role}'")
            path.append(f)
    kw["gauge_path"] = path

    witnesses = data.get("witnesses", {})
    _expect(isinstance(witnesses, dict), "scenario: witnesses must be an object")
    if "quotient" in witnesses:
        _expect(kind == "lcs", "witnesses.quotient: needs kind lcs")
        block = witnesses["quotient"]
        target = _manifold_from(_get(block, "target", dict, "witnesses.quotient"),
                                "witnesses.quotient.target")
        n = target.ambient_dim
        projection = map_from_sources(_get(block, "projection", list,
                                           "witnesses.quotient"),
                                      dim, "witnesses.quotient.projection")
        _expect(len(projection.components) == n,
                "witnesses.quotient: projection does not map into the target")
        reduced = LcsStructure(
            form_from_dict(_get(block, "omega", dict, "witnesses.quotient"), n,
                           "witnesses.quotient.omega"),
            form_from_dict(_get(block, "theta", dict, "witnesses.quotient"), n,
                           "witnesses.quotient.theta"),
            target)
        kw["witness"] = QuotientWitness(projection, reduced,
                                        _parse_scalar(block.get("gauge", "0"),
                                                      dim,
                                                      "witnesses.quotient.gauge"))
    if "contact" in witnesses:
        _expect(kind == "contact", "witnesses.contact: needs kind contact")
        block = witnesses["contact"]
        target = _manifold_from(_get(block, "target", dict, "witnesses.contact"),
                                "witnesses.contact.target")
        n = target.ambient_dim
        projection = map_from_sources(_get(block, "projection", list,
                                           "witnesses.contact"),
                                      dim, "witnesses.contact.projection")
        _expect(len(projection.components) == n,
                "witnesses.contact: projection does not map into the target")
        reduced = ContactStructure(
            form_from_dict(_get(block, "alpha", dict, "witnesses.contact"), n,
                           "witnesses.contact.alpha"),
            target)
        kw["witness"] = ContactWitness(projection, reduced)
    if "lck" in witnesses:
        _expect("witness" in kw and kind == "lcs",
                "witnesses.lck: needs a quotient witness")
        block = witnesses["lck"]
        n = kw["witness"].reduced.manifold.ambient_dim
        kw["lck_witness"] = LckQuotientWitness(
            kw["witness"],
            matrix_from_rows(_get(block, "j", list, "witnesses.lck"), n,
                             "witnesses.lck.j"),
            matrix_from_rows(_get(block, "g", list, "witnesses.lck"), n,
                             "witnesses.lck.g"),
            vaisman=bool(block.get("vaisman", False)))
    if "keep" in witnesses:
        block = witnesses["keep"]
        kw["witness_keep"] = {
            "block": [int(i) for i in _get(block, "block", list,
                                           "witnesses.keep")],
            "floor": float(_get(block, "floor", (int, float), "witnesses.keep")),
        }

    lck_block = data.get("lck", {})
    _expect(isinstance(lck_block, dict), "scenario: lck must be an object")
    if "j" in lck_block or "g" in lck_block:
        _expect(kind == "lcs", "lck: complex data needs kind lcs")
        j = matrix_from_rows(_get(lck_block, "j", list, "lck"), dim, "lck.j")
        g = matrix_from_rows(_get(lck_block, "g", list, "lck"), dim, "lck.g")
        try:
            kw["lck"] = LckStructure(structure, j, g)
        except LcslabError as err:
            raise _fail(f"lck: {err}") from err
        kw["vaisman"] = bool(lck_block.get("vaisman", False))
    if "sasaki_metric" in lck_block:
        kw["sasaki_metric"] = matrix_from_rows(lck_block["sasaki_metric"], dim,
                                               "lck.sasaki_metric")

    fields_block = data.get("fields", {})
    _expect(isinstance(fields_block, dict), "scenario: fields must be an object")
    kw["holomorphic_fields"] = {
        fname: field_from_sources(sources, dim, f"fields.{fname}")
        for fname, sources in fields_block.items()}

    tolerances = data.get("tolerances", {})
    _expect(isinstance(tolerances, dict), "scenario: tolerances must be an object")
    kw["tolerances"] = {str(key): float(value)
                        for key, value in tolerances.items()}

    samples = data.get("samples", {})
    _expect(isinstance(samples, dict), "scenario: samples must be an object")
    kw["sample_count"] = int(samples.get("count", 24))
    kw["sample_radius"] = float(samples.get("radius", 1.5))
    _expect(kw["sample_count"] > 0, "samples: count must be positive")

    kw["use_gauge_for_reduction"] = bool(options.get("use_gauge_for_reduction",
                                                     False))
    kw["run_average"] = bool(options.get("run_average", False))
    extras = options.get("extras", [])
    _expect(isinstance(extras, list), "options: extras must be a list of names")
    from .checks import EXTRA_CHECKS
    for extra in extras:
        _expect(extra in EXTRA_CHECKS, f"options: unknown extra check '{extra}'")
    kw["extras"] = tuple(extras)

    expected = []
    for i, row in enumerate(data.get("expected", [])):
        _expect(isinstance(row, dict), f"expected[{i}]: expected an object")
        value = row.get("value")
        expected.append(ExpectedCheck(
            _get(row, "check", str, f"expected[{i}]"),
            None if value is None else float(value),
            str(row.get("basis", "")),
            float(_get(row, "tol", (int, float), f"expected[{i}]"))))
    kw["expected"] = expected

    if name in registry_names():
        kw["probes"] = load_example(name).probes
    else:
        kw["expected"] = [e for e in expected if e.value is None]

    try:
        return ExampleScenario(name, data.get("description", ""), kind,
                               structure, **kw)
    except LcslabError as err:
        raise _fail(f"scenario: {err}") from err


# -- file plumbing ----------------------------------------------------------

def export_scenario(scn, path: str) -> str:
    """Write the scenario (or registry name) to a JSON file; returns path."""
    if isinstance(scn, str):
        scn = load_example(scn)
    text = json.dumps(scenario_to_dict(scn), sort_keys=True, indent=2) + "\n"
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)
    return path


def load_scenario(path: str) -> ExampleScenario:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as err:
        raise _fail(f"cannot read scenario file: {err}") from err
    except json.JSONDecodeError as err:
        raise _fail(f"scenario file is not valid JSON: {err}") from err
    return scenario_from_dict(data)
