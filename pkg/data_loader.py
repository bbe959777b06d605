"""
Data Loader Module
Loads and validates job configurations and manages the on-disk coefficient cache
"""

import hashlib
import json
import os
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from exact_arith import DirichletCharacter, characters_mod, format_fraction, parse_fraction
from lattice_core import DiscElement, DiscriminantForm, InvalidLatticeError, Lattice, build_discriminant_form
from eisenstein_engine import MODES

CACHE_ENV_VAR = "EISENSTEIN_CACHE_DIR"
DEFAULT_CACHE_DIR = ".eisenstein_cache"
INDEX_FILE = "index.json"


class ConfigError(ValueError):
    """Invalid job configuration; `problems` maps each offending field to its diagnostic."""

    def __init__(self, problems: Dict[str, str]):
        self.problems = dict(problems)
        super().__init__("; ".join(f"{key}: {msg}" for key, msg in sorted(self.problems.items())))


def default_cache_dir() -> str:
    return os.environ.get(CACHE_ENV_VAR) or DEFAULT_CACHE_DIR


@dataclass
class JobConfig:
    """
    One compute/verify job.

    Attributes:
        lattice: Gram matrix rows ([] for the rank-0 lattice)
        weight_twice: 2k
        beta: Coordinates of β in A (resolved from beta_vector when given)
        beta_vector: Optional dual-lattice vector as "num/den" strings
        character: "q:[e1,...]" label or "all"
        n_max: Depth of the tables
        mode: exact | numeric | auto
        precision_bits: Working precision of numeric mode
        cache_dir: Where coefficient tables are cached
        c_max: Truncation of the series oracle used by `verify`
        jobs: Worker threads for coefficient jobs
    """
    lattice: List[List[int]]
    weight_twice: int
    beta: Optional[List[int]] = None
    beta_vector: Optional[List[str]] = None
    character: str = "all"
    n_max: Fraction = Fraction(3)
    mode: str = "auto"
    precision_bits: int = 80
    cache_dir: str = field(default_factory=default_cache_dir)
    c_max: int = 120
    jobs: int = 1

    _lattice: Optional[Lattice] = field(default=None, init=False, repr=False, compare=False)
    _form: Optional[DiscriminantForm] = field(default=None, init=False, repr=False, compare=False)

    @property
    def weight(self) -> Fraction:
        return Fraction(self.weight_twice, 2)

    @property
    def lattice_obj(self) -> Lattice:
        if self._lattice is None:
            self._lattice = Lattice(self.lattice)
        return self._lattice

    @property
    def form(self) -> DiscriminantForm:
        if self._form is None:
            self._form = build_discriminant_form(self.lattice_obj)
        return self._form

    @property
    def beta_element(self) -> DiscElement:
        return self.form.element(self.beta or [])

    def characters(self) -> List[DirichletCharacter]:
        """The characters this job covers (every character mod N_β for "all")."""
        order = self.form.order_of(self.beta_element)
        if self.character == "all":
            return characters_mod(order)
        return [DirichletCharacter.from_label(self.character)]

    def to_dict(self) -> Dict[str, Any]:
        """Canonical JSON-ready form; cache_dir and beta_vector are resolved away."""
        return {
            "lattice": [list(row) for row in self.lattice],
            "weight_twice": self.weight_twice,
            "beta": list(self.beta or []),
            "character": self.character,
            "n_max": format_fraction(self.n_max),
            "mode": self.mode,
            "precision_bits": self.precision_bits,
            "c_max": self.c_max,
            "jobs": self.jobs,
        }

    def content_hash(self) -> str:
        """sha256 of the configuration minus cache_dir and jobs (which never change the output)."""
        payload = self.to_dict()
        payload.pop("jobs")
        text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def with_overrides(self, **overrides) -> "JobConfig":
        """Copy with command-line overrides applied (None values are ignored), re-validated."""
        data = self.to_dict()
        data["cache_dir"] = self.cache_dir
        data.update({key: value for key, value in overrides.items() if value is not None})
        return config_from_dict(data)


def _check_lattice(raw: Any, problems: Dict[str, str]) -> Optional[Lattice]:
    if not isinstance(raw, list) or any(not isinstance(row, list) for row in raw):
        problems["lattice"] = "expected a list of integer rows"
        return None
    if any(not isinstance(x, int) or isinstance(x, bool) for row in raw for x in row):
        problems["lattice"] = "Gram entries must be integers"
        return None
    try:
        return Lattice(raw)
    except InvalidLatticeError as exc:
        problems["lattice"] = str(exc)
        return None


def _resolve_beta(data: Dict[str, Any], form: DiscriminantForm, problems: Dict[str, str]) -> Optional[List[int]]:
    if data.get("beta_vector") is not None:
        try:
            vector = [parse_fraction(x) for x in data["beta_vector"]]
            if len(vector) != form.lattice.rank:
                raise ValueError(f"expected {form.lattice.rank} entries, got {len(vector)}")
            if any(x.denominator != 1 for x in form.lattice.apply(vector)):
                raise ValueError("not a dual-lattice vector")
            return list(form.to_coords(vector).coords)
        except (ValueError, ZeroDivisionError) as exc:
            problems["beta_vector"] = str(exc)
            return None
    beta = data.get("beta")
    if beta is None:
        return [0] * len(form.elementary_divisors)
    if not isinstance(beta, list) or len(beta) != len(form.elementary_divisors):
        problems["beta"] = f"expected {len(form.elementary_divisors)} coordinates in A = {form!r}"
        return None
    return list(form.element(beta).coords)


def config_from_dict(data: Dict[str, Any]) -> JobConfig:
    """
    Build and validate a JobConfig.

    Raises:
        ConfigError: Naming every offending field
    """
    problems: Dict[str, str] = {}
    known = {"lattice", "weight_twice", "beta", "beta_vector", "character", "n_max", "mode",
             "precision_bits", "cache_dir", "c_max", "jobs"}
    for key in sorted(set(data) - known):
        problems[key] = "unknown field"
    for key in ("lattice", "weight_twice"):
        if key not in data:
            problems[key] = "missing"

    lattice = _check_lattice(data.get("lattice"), problems) if "lattice" in data else None

    weight_twice = data.get("weight_twice")
    if "weight_twice" in data:
        if not isinstance(weight_twice, int) or isinstance(weight_twice, bool):
            problems["weight_twice"] = "expected an integer"
        elif weight_twice < 5:
            problems["weight_twice"] = f"2k = {weight_twice} is below 5"
        elif lattice is not None and weight_twice % 2 != lattice.rank % 2:
            problems["weight_twice"] = f"2k = {weight_twice} does not match the parity of rank {lattice.rank}"

    mode = data.get("mode", "auto")
    if mode not in MODES:
        problems["mode"] = f"expected one of {', '.join(MODES)}, got {mode!r}"

    try:
        n_max = parse_fraction(data.get("n_max", 3))
        if n_max < 0:
            problems["n_max"] = "must be non-negative"
    except (ValueError, ZeroDivisionError) as exc:
        problems["n_max"] = str(exc)
        n_max = Fraction(0)

    for key, default, lowest in (("precision_bits", 80, 16), ("c_max", 120, 1), ("jobs", 1, 1)):
        value = data.get(key, default)
        if not isinstance(value, int) or isinstance(value, bool) or value < lowest:
            problems[key] = f"expected an integer >= {lowest}, got {value!r}"

    beta = None
    form = None
    if lattice is not None:
        form = build_discriminant_form(lattice)
        beta = _resolve_beta(data, form, problems)
        if beta is not None:
            element = form.element(beta)
            q = form.q_value(element)
            if q != 0:
                problems["beta"] = f"Q(beta) = {format_fraction(q)} is not 0 mod 1"

    character = data.get("character", "all")
    if character != "all":
        try:
            chi = DirichletCharacter.from_label(str(character))
            if form is not None and beta is not None and "beta" not in problems:
                order = form.order_of(form.element(beta))
                if chi.modulus != order:
                    problems["character"] = f"modulus {chi.modulus} differs from N_beta = {order}"
        except ValueError as exc:
            problems["character"] = str(exc)

    if lattice is not None and isinstance(weight_twice, int) and "weight_twice" not in problems:
        kappa = Fraction(weight_twice, 2) - Fraction(lattice.b_minus, 2) + Fraction(lattice.b_plus, 2)
        if kappa.denominator != 1:
            problems["weight_twice"] = f"kappa = {kappa} is not an integer"

    if problems:
        raise ConfigError(problems)

    config = JobConfig(
        lattice=[list(row) for row in data["lattice"]],
        weight_twice=weight_twice,
        beta=beta,
        character=str(character),
        n_max=n_max,
        mode=mode,
        precision_bits=data.get("precision_bits", 80),
        cache_dir=data.get("cache_dir") or default_cache_dir(),
        c_max=data.get("c_max", 120),
        jobs=data.get("jobs", 1),
    )
    config._lattice = lattice
    config._form = form
    return config


def load_config(file_path: str) -> JobConfig:
    """
    Load a job configuration from a JSON file.

    Raises:
        ConfigError: When the file is missing, malformed or invalid
    """
    if not os.path.exists(file_path):
        raise ConfigError({"config": f"file '{file_path}' not found"})
    try:
        with open(file_path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigError({"config": f"malformed JSON: {exc}"}) from exc
    if not isinstance(data, dict):
        raise ConfigError({"config": "expected a JSON object"})
    return config_from_dict(data)


class CoefficientCache:
    """
    One JSON document per configuration hash plus an index file.

    Documents are immutable and never evicted. Writes go through a single lock
    so concurrent jobs cannot interleave the index.
    """

    _write_lock = threading.Lock()

    def __init__(self, cache_dir: str):
        """
        Initialize the cache.

        Args:
            cache_dir: Directory holding the cached documents
        """
        self.cache_dir = cache_dir

    def _path(self, key: str) -> str:
        return os.path.join(self.cache_dir, f"{key}.json")

    def load_from_cache(self, key: str) -> Optional[str]:
        """
        Return the cached document text for a hash, or None.

        The text is returned verbatim so a hit is byte-identical to the cold run.
        """
        path = self._path(key)
        if not os.path.exists(path):
            return None
        with open(path, "r", encoding="utf-8") as f:
            return f.read()

    def save_to_cache(self, key: str, text: str, summary: Optional[Dict[str, Any]] = None) -> None:
        with self._write_lock:
            os.makedirs(self.cache_dir, exist_ok=True)
            tmp = self._path(key) + ".tmp"
            with open(tmp, "w", encoding="utf-8") as f:
                f.write(text)
            os.replace(tmp, self._path(key))
            index = self.get_index()
            index[key] = summary or {}
            with open(os.path.join(self.cache_dir, INDEX_FILE), "w", encoding="utf-8") as f:
                json.dump(index, f, indent=2, sort_keys=True)

    def get_index(self) -> Dict[str, Any]:
        path = os.path.join(self.cache_dir, INDEX_FILE)
        if not os.path.exists(path):
            return {}
        try:
            with open(path, "r", encoding="utf-8") as f:
                return json.load(f)
        except json.JSONDecodeError:
            return {}

    def get_stats(self) -> Dict[str, Any]:
        index = self.get_index()
        return {"cache_dir": self.cache_dir, "entries": len(index), "keys": sorted(index)}


def describe_lattice(gram: Sequence[Sequence[int]]) -> str:
    lattice = Lattice(gram)
    form = build_discriminant_form(lattice)
    return f"rank {lattice.rank}, signature {lattice.signature}, |A| = {form.order}, level {lattice.level}"
