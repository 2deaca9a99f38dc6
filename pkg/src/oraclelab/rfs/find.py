"""Recursive identification runs: error propagation, query counts, and a
literal coherent simulator at tiny sizes.

``find_simulate`` walks the secret tree and evaluates the recursion's
overlap algebra numerically.  A node's copies are prepared from its
children's certified outputs; writing the children's failure weights
``eps_x`` into the phase-conditioned superposition gives the exact overlap

    c = mean_x [ (1 - eps_x) + (-1)^{f(a, x)} eps_x ]

between the prepared state and the ideally-phased one, hence an uncompute
error ``eps_unc = (1 - c^2)/4``.  Each copy then identifies the node's label
with probability at least ``p_exact - 4 sqrt(eps_unc)`` (pure-state trace
distance), and ``m`` copies push the failure probability down to
``(1 - s)^m``.  Worst-case mode propagates these bounds with adversarial
junk; sampled mode draws the junk direction at random and Monte-Carlos the
same pipeline.

``find_coherent_tiny`` instead allocates every register of the recursion
explicitly (symbol, test, flag and answer registers for each copy at each
level) and runs the full state-vector program, including uncomputation.  It
is the ground truth the model is cross-checked against, and is capped at a
couple of qubits per register.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from ..errors import CertificationError, InvalidConfigError, SizeError
from ..oracle import identify, prepare_phi
from ..simcore import FourierMatrix, action_matrix, apply_matrix_to_qubits
from .core import RecursiveOracleSpec, secret_at

MAX_MODEL_NODES = 100_000
MAX_COHERENT_QUBITS = 22


# ---------------------------------------------------------------------------
# Model-level simulation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LevelStats:
    """Extremes of the propagated quantities across all nodes of one depth."""

    depth: int
    nodes: int
    eps_uncompute_max: float
    eps_out_max: float
    copy_success_min: float
    exact_success_min: float


@dataclass(frozen=True)
class FindReport:
    """Accounting of one simulated recursive identification run."""

    delta: float
    epsilon: float
    m: int
    depth: int
    junk_mode: str
    levels: tuple[LevelStats, ...]
    final_failure_sq: float
    bounds_hold: bool
    answer: int | None
    success_prob: float
    queries_total: int
    queries_closed_form: int
    queries_order_estimate: float
    sampled: dict | None = None

    def to_json_dict(self) -> dict:
        out = {
            "delta": self.delta,
            "epsilon": self.epsilon,
            "m": self.m,
            "l": self.depth,
            "junk_mode": self.junk_mode,
            "final_failure_sq": self.final_failure_sq,
            "bounds_hold": self.bounds_hold,
            "answer": self.answer,
            "success_prob": self.success_prob,
            "queries_total": self.queries_total,
            "queries_closed_form": self.queries_closed_form,
            "queries_order_estimate": self.queries_order_estimate,
            "levels": [
                {
                    "depth": lv.depth,
                    "nodes": lv.nodes,
                    "eps_uncompute_max": lv.eps_uncompute_max,
                    "eps_out_max": lv.eps_out_max,
                    "copy_success_min": lv.copy_success_min,
                    "exact_success_min": lv.exact_success_min,
                }
                for lv in self.levels
            ],
        }
        if self.sampled is not None:
            out["sampled"] = self.sampled
        return out


def repetition_count(delta: float) -> int:
    """Copies per node: ``ceil((4/delta) ln(8/delta))``."""
    return int(math.ceil((4.0 / delta) * math.log(8.0 / delta)))


def query_count(m: int, depth: int) -> int:
    """Exact query recurrence ``Q(k) = 2 m Q(k+1) + 2 m`` with ``Q(l) = 0``."""
    q = 0
    for _ in range(depth):
        q = 2 * m * q + 2 * m
    return q


def query_count_closed_form(m: int, depth: int) -> int:
    return sum((2 * m) ** j for j in range(1, depth + 1))


def _apply_unitary(unitary, vec: np.ndarray) -> np.ndarray:
    if isinstance(unitary, FourierMatrix):
        return unitary.entries @ vec
    return unitary.apply(vec)


def _block_success(unitary, vec: np.ndarray, rows) -> float:
    out = _apply_unitary(unitary, vec)
    return float(np.sum(np.abs(out[list(rows)]) ** 2))


def _haar_perp(rng: np.random.Generator, anchor: np.ndarray) -> np.ndarray:
    """A Haar-random unit vector orthogonal to ``anchor``."""
    dim = anchor.shape[0]
    while True:
        z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        z = z - anchor * np.vdot(anchor, z)
        norm = np.linalg.norm(z)
        if norm > 1e-12:
            return z / norm


def find_simulate(
    spec: RecursiveOracleSpec,
    unitary,
    delta: float,
    junk_mode: str = "worst",
    m_override: int | None = None,
    inject: dict | None = None,
    junk_draws: int = 100,
    rng: np.random.Generator | None = None,
) -> FindReport:
    """Simulate the recursion level by level and account errors and queries.

    ``junk_mode`` is ``worst`` (interval propagation with the adversarial
    trace-distance penalty), ``sampled`` (Haar-random junk, Monte Carlo over
    ``junk_draws`` draws; requires ``rng``), or ``both``.  ``inject`` maps a
    node path to an extra failure weight added to that node's output, a hook
    for cross-validating against the coherent simulator.  ``m_override``
    replaces the repetition count derived from ``delta`` (same hook).

    Raises :class:`CertificationError` naming the first encountered label
    whose exact single-level success falls below ``delta``.
    """
    if junk_mode not in ("worst", "sampled", "both"):
        raise InvalidConfigError(f"unknown junk mode {junk_mode!r}")
    if not 0 < delta <= 1:
        raise InvalidConfigError("delta must lie in (0, 1]")
    inject = dict(inject or {})
    epsilon = (delta / 8.0) ** 2
    m = m_override if m_override is not None else repetition_count(delta)
    depth = spec.depth
    dim = 2**spec.n_symbol_bits
    n_nodes = sum(dim**k for k in range(depth))
    if n_nodes > MAX_MODEL_NODES:
        raise SizeError(f"{n_nodes} internal nodes exceed the model cap")

    oracle = spec.oracle
    exact_cache: dict[int, float] = {}

    def exact_success(label: int, path) -> float:
        if label not in exact_cache:
            p = identify(unitary, oracle, label).success_prob
            if p < delta - 1e-12:
                raise CertificationError(
                    f"label {label} at node {path} identifies with probability "
                    f"{p:.6f} < delta {delta}"
                )
            exact_cache[label] = p
        return exact_cache[label]

    stats = {
        k: {"nodes": 0, "eps_unc": 0.0, "eps_out": 0.0, "s_min": 1.0, "p_min": 1.0}
        for k in range(depth)
    }

    def overlap_from_children(label: int, child_eps: np.ndarray) -> float:
        signs = 1.0 - 2.0 * oracle.f_bits[label].astype(float)
        return float(np.mean((1.0 - child_eps) + signs * child_eps))

    def node_bound(path: tuple[int, ...]) -> float:
        k = len(path)
        label = secret_at(spec, path)
        if k + 1 < depth:
            child_eps = np.array([node_bound(path + (x,)) for x in range(dim)])
        else:
            child_eps = np.zeros(dim)
        c = overlap_from_children(label, child_eps)
        eps_unc = max(0.0, (1.0 - c * c) / 4.0)
        p = exact_success(label, path)
        s_floor = max(0.0, p - 4.0 * math.sqrt(eps_unc))
        eps_out = min(1.0, (1.0 - s_floor) ** m + inject.get(path, 0.0))
        st = stats[k]
        st["nodes"] += 1
        st["eps_unc"] = max(st["eps_unc"], eps_unc)
        st["eps_out"] = max(st["eps_out"], eps_out)
        st["s_min"] = min(st["s_min"], s_floor)
        st["p_min"] = min(st["p_min"], p)
        return eps_out

    root_eps = node_bound(())
    levels = tuple(
        LevelStats(
            depth=k,
            nodes=stats[k]["nodes"],
            eps_uncompute_max=stats[k]["eps_unc"],
            eps_out_max=stats[k]["eps_out"],
            copy_success_min=stats[k]["s_min"],
            exact_success_min=stats[k]["p_min"],
        )
        for k in range(depth)
    )
    bounds_hold = all(
        lv.eps_uncompute_max <= epsilon + 1e-15
        and lv.eps_out_max <= epsilon + 1e-15
        and lv.copy_success_min >= delta / 2.0 - 1e-15
        for lv in levels
    )

    sampled_stats = None
    if junk_mode in ("sampled", "both"):
        if rng is None:
            raise InvalidConfigError("sampled junk mode requires an rng stream")
        if n_nodes * m * junk_draws > 5_000_000:
            raise SizeError("sampled junk mode too large; shrink the tree or draws")

        def node_sampled(path: tuple[int, ...]) -> float:
            k = len(path)
            label = secret_at(spec, path)
            if k + 1 < depth:
                child_eps = np.array([node_sampled(path + (x,)) for x in range(dim)])
            else:
                child_eps = np.zeros(dim)
            c = overlap_from_children(label, child_eps)
            eps_unc = max(0.0, (1.0 - c * c) / 4.0)
            phi = prepare_phi(oracle, label).amplitudes
            rows = oracle.labels[label].rows
            fail = 1.0
            for _copy in range(m):
                tilde = phi if eps_unc == 0.0 else (
                    math.sqrt(1.0 - 4.0 * eps_unc) * phi
                    + math.sqrt(4.0 * eps_unc) * _haar_perp(rng, phi)
                )
                fail *= max(0.0, 1.0 - _block_success(unitary, tilde, rows))
            return min(1.0, fail + inject.get(path, 0.0))

        draws = np.array([1.0 - node_sampled(()) for _ in range(junk_draws)])
        sampled_stats = {
            "draws": junk_draws,
            "success_mean": float(np.mean(draws)),
            "success_min": float(np.min(draws)),
            "success_max": float(np.max(draws)),
        }

    return FindReport(
        delta=delta,
        epsilon=epsilon,
        m=m,
        depth=depth,
        junk_mode=junk_mode,
        levels=levels,
        final_failure_sq=root_eps,
        bounds_hold=bounds_hold,
        answer=spec.b_root if bounds_hold else None,
        success_prob=1.0 - root_eps,
        queries_total=query_count(m, depth),
        queries_closed_form=query_count_closed_form(m, depth),
        queries_order_estimate=float(2 * m) ** (2 * depth),
        sampled=sampled_stats,
    )


# ---------------------------------------------------------------------------
# Literal coherent execution at tiny sizes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoherentReport:
    """Outcome of a full state-vector run of the recursion."""

    answer: int
    total_qubits: int
    success_prob: float
    uncompute_residuals: tuple[float, ...] = ()
    answer_register_consistent: bool = True


class _RegisterUnitary:
    def __init__(self, qubits: tuple[int, ...], matrix: np.ndarray):
        self.qubits = qubits
        self.matrix = matrix

    def run(self, state, total, adjoint):
        mat = self.matrix.conj().T if adjoint else self.matrix
        return apply_matrix_to_qubits(state, total, mat, self.qubits)


class _Diagonal:
    """Real signature diagonal (entries +-1): self-adjoint."""

    def __init__(self, signs: np.ndarray):
        self.signs = signs

    def run(self, state, total, adjoint):
        return state * self.signs


class _ConditionalXor:
    """Permutation ``i -> i ^ x(i)`` on a condition set not touching ``x`` bits."""

    def __init__(self, cond: np.ndarray, xor_values: np.ndarray):
        self.cond = cond
        self.xor_values = xor_values

    def run(self, state, total, adjoint):
        out = state.copy()
        src = np.nonzero(self.cond)[0]
        out[src ^ self.xor_values[src]] = state[src]
        return out


class _ControlledRY:
    def __init__(self, flag_bit: int, cond: np.ndarray, angle: float):
        self.flag_bit = flag_bit
        self.cond = cond
        self.angle = angle

    def run(self, state, total, adjoint):
        angle = -self.angle if adjoint else self.angle
        c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
        mask = 1 << self.flag_bit
        idx0 = np.nonzero(self.cond & ((np.arange(state.shape[0]) & mask) == 0))[0]
        idx1 = idx0 | mask
        out = state.copy()
        out[idx0] = c * state[idx0] - s * state[idx1]
        out[idx1] = s * state[idx0] + c * state[idx1]
        return out


class _Probe:
    """Measurement-free diagnostic: norm outside a register block's |0> slice."""

    def __init__(self, bits: list[int], sink: list):
        mask = 0
        for b in bits:
            mask |= 1 << b
        self.mask = mask
        self.sink = sink

    def run(self, state, total, adjoint):
        if not adjoint:
            idx = np.arange(state.shape[0])
            residual = float(np.linalg.norm(state[(idx & self.mask) != 0]))
            self.sink.append(residual)
        return state


def _run_ops(state, total, ops, adjoint=False):
    if adjoint:
        for op in reversed(ops):
            state = op.run(state, total, adjoint=True)
    else:
        for op in ops:
            state = op.run(state, total, adjoint=False)
    return state


class _AdjointBlock:
    """Wrap a sub-list of ops as one inverse step."""

    def __init__(self, ops: list):
        self.ops = ops

    def run(self, state, total, adjoint):
        return _run_ops(state, total, self.ops, adjoint=not adjoint)


def _hadamard_layer_matrix(n: int) -> np.ndarray:
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
    out = np.array([[1.0]])
    for _ in range(n):
        out = np.kron(out, h)
    return out.astype(complex)


def find_coherent_tiny(
    spec: RecursiveOracleSpec,
    unitary,
    m_override: int = 1,
    inject: dict | None = None,
) -> CoherentReport:
    """Run the recursion as an explicit unitary program on all its registers.

    Every copy at every level gets a symbol register, a child block (below
    the last level), and a test qubit; each instance ends with a flag qubit
    and an answer register.  The child invocation and its inverse are the
    same op-list run forwards and backwards, so uncomputation is literal.
    ``inject`` maps a node path to an extra failure weight; it is realized
    as a rotation on that instance's flag qubit inside the instance's
    program (so the inverse call undoes the rotation but not its
    entanglement with the conditioned phase, exactly like a noisy child).

    Returns the exact success probability of the root identification plus
    the norms left behind in child blocks after each uncompute step.
    """
    n = spec.n_symbol_bits
    depth = spec.depth
    m = m_override
    inject = dict(inject or {})
    if n > 2 or depth > 2 or m > 3:
        raise SizeError("coherent run capped at n <= 2, depth <= 2, m <= 3")

    oracle = spec.oracle
    idents = [s.ident for s in oracle.labels]
    if not all(isinstance(i, int) for i in idents):
        raise InvalidConfigError("coherent run needs integer basis labels")
    ans_bits = max(1, int(max(idents)).bit_length())
    dim_sym = 2**n

    # --- register layout, allocated depth-first ---
    regs: dict = {}

    def alloc(level: int, inst: tuple[int, ...], cursor: int) -> int:
        for c in range(m):
            regs[("sym", inst, c)] = (cursor, n)
            cursor += n
            if level + 1 < depth:
                cursor = alloc(level + 1, inst + (c,), cursor)
            regs[("test", inst, c)] = (cursor, 1)
            cursor += 1
        regs[("flag", inst)] = (cursor, 1)
        cursor += 1
        regs[("ans", inst)] = (cursor, ans_bits)
        cursor += ans_bits
        return cursor

    total = alloc(0, (), 0)
    if total > MAX_COHERENT_QUBITS:
        raise SizeError(f"{total} qubits exceed the coherent cap {MAX_COHERENT_QUBITS}")
    dim = 2**total
    idx = np.arange(dim)

    def reg_val(key) -> np.ndarray:
        off, width = regs[key]
        return (idx >> off) & ((1 << width) - 1)

    def reg_qubits(key) -> tuple[int, ...]:
        off, width = regs[key]
        return tuple(range(off + width - 1, off - 1, -1))

    def block_bits(inst: tuple[int, ...]) -> list[int]:
        bits = []
        for key, (off, width) in regs.items():
            owner = key[1]
            if owner[: len(inst)] == inst and len(owner) >= len(inst):
                bits.extend(range(off, off + width))
        return bits

    def secret_ident(path: tuple[int, ...]) -> int:
        return int(idents[secret_at(spec, path)])

    h_layer = _hadamard_layer_matrix(n)
    u_matrix = action_matrix(unitary)

    def ancestors_of(inst: tuple[int, ...]) -> list:
        return [("sym", inst[:j], inst[j]) for j in range(len(inst))]

    def ancestor_mask(inst: tuple[int, ...], combo: tuple[int, ...]) -> np.ndarray:
        mask = np.ones(dim, dtype=bool)
        for key, val in zip(ancestors_of(inst), combo):
            mask &= reg_val(key) == val
        return mask

    residuals: list[float] = []

    def build(level: int, inst: tuple[int, ...]) -> list:
        k = len(inst)
        ops: list = []
        anc_combos = list(product(range(dim_sym), repeat=k))
        for c in range(m):
            sym_key = ("sym", inst, c)
            ops.append(_RegisterUnitary(reg_qubits(sym_key), h_layer))
            child_program: list = []
            if level + 1 < depth:
                child_program = build(level + 1, inst + (c,))
                for path, eps in inject.items():
                    # A noisy child carries its rotation inside its own
                    # program: the inverse call undoes the rotation itself
                    # but not the phase it conditioned in between.
                    if len(path) == level + 1 and eps > 0.0:
                        cond = ancestor_mask(inst + (c,), tuple(path))
                        angle = 2.0 * math.asin(math.sqrt(eps))
                        child_program.append(
                            _ControlledRY(regs[("flag", inst + (c,))][0], cond, angle)
                        )
                ops.extend(child_program)
            # Data-bit phase, keyed on the child's answer when one exists.
            signs = np.ones(dim)
            sym_vals = reg_val(sym_key)
            for combo in anc_combos:
                label = secret_at(spec, combo)
                sign_by_x = 1.0 - 2.0 * oracle.f_bits[label].astype(float)
                where = ancestor_mask(inst, combo)
                if level + 1 < depth:
                    key_by_x = np.array(
                        [secret_ident(combo + (x,)) for x in range(dim_sym)]
                    )
                    where = where & (reg_val(("flag", inst + (c,))) == 0)
                    where = where & (reg_val(("ans", inst + (c,))) == key_by_x[sym_vals])
                signs = np.where(where, sign_by_x[sym_vals], signs)
            ops.append(_Diagonal(signs))
            if level + 1 < depth:
                ops.append(_AdjointBlock(child_program))
                if k == 0:
                    ops.append(_Probe(block_bits(inst + (c,)), residuals))
        for c in range(m):
            sym_key = ("sym", inst, c)
            ops.append(_RegisterUnitary(reg_qubits(sym_key), u_matrix))
            flip = np.zeros(dim, dtype=np.int64)
            cond = np.zeros(dim, dtype=bool)
            sym_vals = reg_val(sym_key)
            for combo in anc_combos:
                here = ancestor_mask(inst, combo) & (sym_vals == secret_ident(combo))
                cond |= here
            flip[:] = 1 << regs[("test", inst, c)][0]
            ops.append(_ConditionalXor(cond, flip))
            ops.append(_RegisterUnitary(reg_qubits(sym_key), u_matrix.conj().T))
        all_fail = np.ones(dim, dtype=bool)
        for c in range(m):
            all_fail &= reg_val(("test", inst, c)) == 0
        ops.append(
            _ConditionalXor(all_fail, np.full(dim, 1 << regs[("flag", inst)][0]))
        )
        ans_off = regs[("ans", inst)][0]
        flag_ok = reg_val(("flag", inst)) == 0
        xor_vals = np.zeros(dim, dtype=np.int64)
        cond = np.zeros(dim, dtype=bool)
        for combo in anc_combos:
            here = ancestor_mask(inst, combo) & flag_ok
            cond |= here
            xor_vals[here] = secret_ident(combo) << ans_off
        ops.append(_ConditionalXor(cond, xor_vals))
        return ops

    program = build(0, ())
    state = np.zeros(dim, dtype=complex)
    state[0] = 1.0
    state = _run_ops(state, total, program)

    flag_vals = reg_val(("flag", ()))
    ans_vals = reg_val(("ans", ()))
    probs = np.abs(state) ** 2
    success = float(np.sum(probs[flag_vals == 0]))
    success_with_ans = float(
        np.sum(probs[(flag_vals == 0) & (ans_vals == secret_ident(()))])
    )
    return CoherentReport(
        answer=spec.b_root,
        total_qubits=total,
        success_prob=success,
        uncompute_residuals=tuple(residuals),
        answer_register_consistent=abs(success - success_with_ans) < 1e-12,
    )
