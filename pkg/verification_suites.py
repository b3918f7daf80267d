#!/usr/bin/env python3
"""
验证套件

每个套件在小基数下穷举（或按种子随机抽样）检查一组恒等式，
按不变量统计通过数/总数，结果可导出为 JSON。
"""

import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product
from math import factorial
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Tuple

import orjson
from loguru import logger
from tqdm import tqdm

from compositions import (
    EMPTY, Composition, FiniteSet, composition, concat, deshuffle, enumerate_compositions,
    ordered_bell, parse_composition, restrict,
)
from config import configure_logging, get_settings
from errors import CausalSpeciesError, DomainError
from scalars import ONE, frac, scalar
from species_algebra import (
    H, SigElement, _add_into, antipode, commutator, comult, counit, decorate, decorated_antipode,
    from_q_coordinates, hopf_power_action, hopf_power_by_coproduct, is_primitive, iterated_comult,
    mult, q_to_h, relabel, tensor, to_q_coordinates, unit,
)
from steinmann_arrows import (
    ArrowDirection, advanced_arrow, advanced_element, cell_arrow, curried_arrow_series, fresh_labels,
    iterated_arrow, retarded_arrow, retarded_element, series_product, up_derivation,
)
from product_systems import (
    Character, Coupling, Decoration, PerturbedSystem, TargetPoly, ToyCausalSystem, bogoliubov_extract,
    generating_function, generating_function_rhs, generalized_R, inverse_t_exponential, respects,
    scattering_check, t_exponential, tits_kernel_elements, verify_causal_factorization, verify_vacuum_stability,
)
from zie_cells import (
    Leaf, Node, Tree, brute_force_cells, dynkin_element, dynkin_rank, enumerate_cells, make_cell,
    steinmann_quadruples, steinmann_relation_quotient_dimension, steinmann_sum, tree_to_Q, verify_ruelle,
    zie_dimension,
)

# 已知的胞腔数（n = 1..5）
CELL_COUNTS = {1: 1, 2: 2, 3: 6, 4: 32, 5: 370}

# 四点例子中的胞腔
EXAMPLE_CELL_CHANNELS = ["(23,14)", "(12,34)", "(1,234)", "(13,24)", "(134,2)", "(3,124)", "(123,4)"]


@dataclass
class CheckResult:
    """单项检查结果"""
    invariant: str
    case: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteReport:
    """套件报告"""
    suite: str
    seed: int
    params: Dict[str, Any] = field(default_factory=dict)
    results: List[CheckResult] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def correct(self) -> int:
        return sum(1 for r in self.results if r.passed)

    @property
    def total(self) -> int:
        return len(self.results)

    @property
    def passed(self) -> bool:
        return self.correct == self.total

    def counters(self) -> Dict[str, Dict[str, int]]:
        stats: Dict[str, Dict[str, int]] = {}
        for r in self.results:
            entry = stats.setdefault(r.invariant, {"correct": 0, "total": 0})
            entry["total"] += 1
            if r.passed:
                entry["correct"] += 1
        return dict(sorted(stats.items()))

    def failures(self) -> List[CheckResult]:
        return [r for r in self.results if not r.passed]

    def to_json(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "params": self.params,
            "passed": self.passed,
            "correct": self.correct,
            "total": self.total,
            "counters": self.counters(),
            "data": self.data,
            "failures": [
                {"invariant": r.invariant, "case": r.case, "detail": r.detail} for r in self.failures()
            ],
        }


class _Recorder:
    def __init__(self, report: SuiteReport):
        self.report = report

    def check(self, invariant: str, case: str, predicate: Callable[[], bool]) -> bool:
        try:
            ok, detail = bool(predicate()), ""
        except CausalSpeciesError as e:
            ok, detail = False, f"{type(e).__name__}: {e}"
        if not ok:
            logger.info(f"检查失败 [{invariant}] {case} {detail}")
        self.report.results.append(CheckResult(invariant, case, ok, detail))
        return ok


def _ground(n: int) -> FiniteSet:
    return frozenset(range(1, n + 1))


def _decompositions(I: FiniteSet) -> Iterator[Tuple[FiniteSet, FiniteSet]]:
    """全部有序分解 S⊔T=I（允许空集）"""
    labels = sorted(I)
    for mask in range(1 << len(labels)):
        S = frozenset(l for k, l in enumerate(labels) if mask >> k & 1)
        yield S, I - S


def _triple_decompositions(I: FiniteSet) -> Iterator[Tuple[FiniteSet, FiniteSet, FiniteSet]]:
    labels = sorted(I)
    for word in product(range(3), repeat=len(labels)):
        blocks = [frozenset(l for l, w in zip(labels, word) if w == k) for k in range(3)]
        yield blocks[0], blocks[1], blocks[2]


def _basis_pairs(I: FiniteSet, proper: bool = False) -> Iterator[Tuple[Composition, Composition]]:
    """A⊔B=I 时 Σ[A]×Σ[B] 的全部基元素对"""
    for A, B in _decompositions(I):
        if proper and (not A or not B):
            continue
        for F in enumerate_compositions(A):
            for G in enumerate_compositions(B):
                yield F, G


def _start(suite: str, seed: Optional[int], **params) -> Tuple[SuiteReport, _Recorder]:
    seed = get_settings().seed if seed is None else seed
    report = SuiteReport(suite=suite, seed=seed, params=params)
    return report, _Recorder(report)


def _progress(items: Iterable, desc: str, progress: bool):
    return tqdm(list(items), desc=desc, disable=not progress, leave=False)


# =============================================================================
# Hopf 结构
# =============================================================================

def _bimonoid_holds(F: Composition, G: Composition) -> bool:
    A, B = F.ground, G.ground
    product_element = H(concat(F, G))
    for S, T in _decompositions(A | B):
        expected: Dict = {}
        for (F1, F2), c in comult(H(F), A & S, A & T).items():
            for (G1, G2), d in comult(H(G), B & S, B & T).items():
                _add_into(expected, (concat(F1, G1), concat(F2, G2)), c * d)
        if comult(product_element, S, T) != expected:
            return False
    return True


def _coassociative(F: Composition) -> bool:
    a = H(F)
    for S, T, U in _triple_decompositions(F.ground):
        left: Dict = {}
        for (X, Z), c in comult(a, S | T, U).items():
            for (X1, X2), d in comult(H(X), S, T).items():
                _add_into(left, (X1, X2, Z), c * d)
        right: Dict = {}
        for (X, Y), c in comult(a, S, T | U).items():
            for (Y1, Y2), d in comult(H(Y), T, U).items():
                _add_into(right, (X, Y1, Y2), c * d)
        if not (left == right == iterated_comult(a, [S, T, U])):
            return False
    return True


def _inversion_sums(F: Composition) -> Tuple[SigElement, SigElement]:
    """Σ H_{F|S} H̄_{F|T} 与 Σ H̄_{F|S} H_{F|T}"""
    I = F.ground
    left, right = SigElement(I, {}), SigElement(I, {})
    for S, T in _decompositions(I):
        FS, FT = H(restrict(F, S)), H(restrict(F, T))
        left = left + mult(FS, antipode(FT))
        right = right + mult(antipode(FS), FT)
    return left, right


def run_hopf_suite(n: int = 3, seed: Optional[int] = None, progress: bool = False, **_) -> SuiteReport:
    """双幺半群相容性、(余)结合律、余单位、对极反演"""
    started = time.time()
    report, rec = _start("hopf", seed, n=n)
    I = _ground(n)
    basis = list(enumerate_compositions(I))

    for F, G in _progress(_basis_pairs(I), "bimonoid", progress):
        rec.check("bimonoid", f"{F}·{G}", lambda: _bimonoid_holds(F, G))

    for S, T, U in _triple_decompositions(I):
        x = q_to_h(composition(S)) if S else unit()
        y = q_to_h(composition(T)) if T else unit()
        z = q_to_h(composition(U)) if U else unit()
        rec.check("associativity", f"{sorted(S)}|{sorted(T)}|{sorted(U)}",
                  lambda: mult(mult(x, y), z) == mult(x, mult(y, z)))

    for F in _progress(basis, "coproduct", progress):
        a = H(F)
        rec.check("coassociativity", str(F), lambda: _coassociative(F))
        rec.check("counit", str(F), lambda: (
            comult(a, I, frozenset()) == {(F, EMPTY): ONE}
            and comult(a, frozenset(), I) == {(EMPTY, F): ONE}
            and not counit(a)
        ))
        rec.check("antipode_inversion", str(F), lambda: all(s.is_zero() for s in _inversion_sums(F)))
        symbols = {l: f"A{l}" for l in I}
        rec.check("decorated_antipode", str(F),
                  lambda: decorated_antipode(decorate(a, symbols)) == decorate(antipode(a), symbols))

    rec.check("unit", "H_()", lambda: counit(unit()) == ONE and antipode(unit()) == unit())
    report.data["basis_size"] = len(basis)
    report.elapsed = time.time() - started
    return report


# =============================================================================
# Q 基与 Hopf 幂
# =============================================================================

def _q_comult_holds(F: Composition) -> bool:
    q = q_to_h(F)
    for S, T in _decompositions(F.ground):
        left = deshuffle(F, S)
        expected = {} if left is None else tensor(q_to_h(left), q_to_h(restrict(F, T)))
        if comult(q, S, T) != expected:
            return False
    return True


def run_qbasis_suite(n: int = 3, seed: Optional[int] = None, progress: bool = False, **_) -> SuiteReport:
    """H↔Q 基变换、Q 基乘法与余乘法、Tits 作用"""
    started = time.time()
    report, rec = _start("qbasis", seed, n=n)
    I = _ground(n)
    basis = list(enumerate_compositions(I))

    for F in _progress(basis, "qbasis", progress):
        rec.check("round_trip", str(F), lambda: (
            from_q_coordinates(to_q_coordinates(H(F))) == H(F)
            and to_q_coordinates(q_to_h(F)) == H(F)
        ))
        rec.check("q_comult", str(F), lambda: _q_comult_holds(F))

    for F, G in _progress(_basis_pairs(I), "q_mult", progress):
        rec.check("q_mult", f"Q{F}·Q{G}", lambda: mult(q_to_h(F), q_to_h(G)) == q_to_h(concat(F, G)))

    if I:
        rec.check("primitive_one_lump", f"Q({n})", lambda: is_primitive(q_to_h(composition(I))))

    for F in _progress(basis, "tits", progress):
        for G in basis:
            rec.check("hopf_power", f"{F}▷{G}", lambda: (
                hopf_power_action(H(F), G) == hopf_power_by_coproduct(F, G)
                and hopf_power_action(hopf_power_action(H(F), G), G) == hopf_power_action(H(F), G)
            ))

    report.data["basis_size"] = len(basis)
    report.elapsed = time.time() - started
    return report


# =============================================================================
# Dynkin 元素与树
# =============================================================================

def binary_trees(labels: FiniteSet) -> Iterator[Tree]:
    """叶子为单点的全部二叉树"""
    labels = frozenset(labels)
    if len(labels) == 1:
        yield Leaf(labels)
        return
    ordered = sorted(labels)
    for r in range(1, len(ordered)):
        for left in combinations(ordered, r):
            L = frozenset(left)
            for lt in binary_trees(L):
                for rt in binary_trees(labels - L):
                    yield Node(lt, rt)


def run_dynkin_suite(n: int = 3, seed: Optional[int] = None, progress: bool = False, **_) -> SuiteReport:
    """胞腔计数、Dynkin 元素本原性、树元素本原性、秩"""
    started = time.time()
    report, rec = _start("dynkin", seed, n=n)
    I = _ground(n)
    cells = list(enumerate_cells(I, report.seed))
    report.data["cells"] = len(cells)

    if n in CELL_COUNTS:
        rec.check("cell_count", f"n={n}", lambda: len(cells) == CELL_COUNTS[n])
    if n <= 4:
        rec.check("cell_brute_force", f"n={n}",
                  lambda: {c.channels for c in brute_force_cells(I)} == {c.channels for c in cells})
    rec.check("composition_count", f"n={n}", lambda: len(list(enumerate_compositions(I))) == ordered_bell(n))

    for cell in _progress(cells, "dynkin", progress):
        rec.check("dynkin_primitive", str(cell), lambda: is_primitive(dynkin_element(cell).element))

    if n <= 4:
        for tree in _progress(binary_trees(I), "trees", progress):
            rec.check("tree_primitive", str(tree), lambda: is_primitive(tree_to_Q(tree).element))

    rank = dynkin_rank(I, report.seed)
    report.data["rank"] = rank
    rec.check("rank", f"n={n}", lambda: rank == zie_dimension(n))
    report.elapsed = time.time() - started
    return report


# =============================================================================
# Steinmann 关系
# =============================================================================

def example_cell():
    return make_cell(_ground(4), [parse_composition(text) for text in EXAMPLE_CELL_CHANNELS])


def run_steinmann_suite(n: int = 4, seed: Optional[int] = None, progress: bool = False, **_) -> SuiteReport:
    """四项交错和为零；秩与商维数"""
    started = time.time()
    report, rec = _start("steinmann", seed, n=n)
    I = _ground(n)
    quadruples = list(steinmann_quadruples(I, report.seed))
    report.data["quadruples"] = len(quadruples)

    for quad in _progress(quadruples, "steinmann", progress):
        rec.check("alternating_sum", " ".join(str(c) for c in quad), lambda: steinmann_sum(quad).is_zero())

    if n == 4:
        target = example_cell().channels
        rec.check("example_quadruple", "四点例子",
                  lambda: any(c.channels == target for quad in quadruples for c in quad))

    rank = dynkin_rank(I, report.seed)
    report.data["rank"] = rank
    quotient = steinmann_relation_quotient_dimension(I, report.seed)
    report.data["quotient_dimension"] = quotient
    rec.check("rank", f"n={n}", lambda: rank == zie_dimension(n))
    rec.check("quotient_dimension", f"n={n}", lambda: quotient == zie_dimension(n))
    report.elapsed = time.time() - started
    return report


# =============================================================================
# Ruelle 恒等式
# =============================================================================

RUELLE_RANDOM_PAIRS = 100


def default_random_pairs(n: int) -> int:
    """n = 4 时默认追加 100 个 |S|+|T| = 5 的随机对"""
    return RUELLE_RANDOM_PAIRS if n == 4 else 0


def run_ruelle_suite(n: int = 4, seed: Optional[int] = None, progress: bool = False,
                     random_pairs: Optional[int] = None, **_) -> SuiteReport:
    """|S|+|T| ≤ n 的全部胞腔对，外加 |S|+|T| = n+1 的随机对；随机对在两个见证种子下都要成立"""
    started = time.time()
    if random_pairs is None:
        random_pairs = default_random_pairs(n)
    report, rec = _start("ruelle", seed, n=n, random_pairs=random_pairs)
    cases = []
    for total in range(2, n + 1):
        for a in range(1, total):
            S = frozenset(range(1, a + 1))
            T = frozenset(range(a + 1, total + 1))
            for c1 in enumerate_cells(S, report.seed):
                for c2 in enumerate_cells(T, report.seed):
                    cases.append((c1, c2))
    for c1, c2 in _progress(cases, "ruelle", progress):
        rec.check("ruelle", f"{c1}⊔{c2}", lambda: verify_ruelle(c1, c2, report.seed))

    rng = random.Random(report.seed)
    total = n + 1
    for k in range(random_pairs):
        a = rng.randint(1, total - 1)
        S = frozenset(range(1, a + 1))
        T = frozenset(range(a + 1, total + 1))
        c1 = rng.choice(list(enumerate_cells(S, report.seed)))
        c2 = rng.choice(list(enumerate_cells(T, report.seed)))
        witness_seeds = (report.seed + 2 * k, report.seed + 2 * k + 1)
        rec.check("ruelle_random", f"#{k} {c1}⊔{c2}",
                  lambda: all(verify_ruelle(c1, c2, s) for s in witness_seeds))

    report.data["pairs"] = len(cases) + random_pairs
    report.elapsed = time.time() - started
    return report


# =============================================================================
# Steinmann 箭头
# =============================================================================

COEFFICIENT_CHOICES = [(1, 0), (0, 1), (2, -3)]


def _coderivation_holds(F: Composition, star, coeffs) -> bool:
    image = up_derivation(H(F), star, coeffs)
    for S, T in _decompositions(F.ground):
        left: Dict = {}
        for (F1, F2), c in comult(H(F), S, T).items():
            for (G1, G2), d in tensor(up_derivation(H(F1), star, coeffs), H(F2)).items():
                _add_into(left, (G1, G2), c * d)
        if comult(image, S | {star}, T) != left:
            return False
        right: Dict = {}
        for (F1, F2), c in comult(H(F), S, T).items():
            for (G1, G2), d in tensor(H(F1), up_derivation(H(F2), star, coeffs)).items():
                _add_into(right, (G1, G2), c * d)
        if comult(image, S, T | {star}) != right:
            return False
    return True


def run_arrows_suite(n: int = 3, seed: Optional[int] = None, progress: bool = False,
                     r_max: int = 2, **_) -> SuiteReport:
    """(余)导子律、交换性、↑-↓ = ad、R/A 闭式、胞腔箭头、柯里化同态"""
    started = time.time()
    report, rec = _start("arrows", seed, n=n, r_max=r_max)
    I = _ground(n)
    star, star2 = fresh_labels(2)
    basis = list(enumerate_compositions(I))

    for coeffs in COEFFICIENT_CHOICES:
        for F, G in _basis_pairs(I, proper=True):
            rec.check("derivation", f"u{coeffs} {F}·{G}", lambda: (
                up_derivation(mult(H(F), H(G)), star, coeffs)
                == mult(up_derivation(H(F), star, coeffs), H(G)) + mult(H(F), up_derivation(H(G), star, coeffs))
            ))
        for F in basis:
            rec.check("coderivation", f"u{coeffs} {F}", lambda: _coderivation_holds(F, star, coeffs))

    for F in _progress(basis, "arrows", progress):
        a = H(F)
        rec.check("commutativity", str(F), lambda: (
            iterated_arrow(a, [star, star2], order=[star, star2]) == iterated_arrow(a, [star, star2], order=[star2, star])
            and advanced_arrow(retarded_arrow(a, star), star2) == retarded_arrow(advanced_arrow(a, star2), star)
        ))
        rec.check("ad_identity", str(F),
                  lambda: advanced_arrow(a, star) - retarded_arrow(a, star) == commutator(H(composition([star])), a))

    for r in range(min(n, 3) + 1):
        Y = fresh_labels(r)
        whole = H(composition(I)) if I else unit()
        rec.check("retarded_closed_form", f"|Y|={r}", lambda: iterated_arrow(whole, Y) == retarded_element(Y, I))
        rec.check("advanced_closed_form", f"|Y|={r}",
                  lambda: iterated_arrow(whole, Y, ArrowDirection.ADVANCED) == advanced_element(Y, I))

    if 1 <= n <= 3:
        for cell in _progress(list(enumerate_cells(I, report.seed)), "cell_arrows", progress):
            D = dynkin_element(cell).element
            for r in (1, 2):
                Y = fresh_labels(r)
                for direction in ArrowDirection:
                    rec.check("dynkin_arrow", f"{direction.value} |Y|={r} {cell}", lambda: (
                        iterated_arrow(D, Y, direction) == dynkin_element(cell_arrow(cell, Y, direction)).element
                    ))

    for F, G in _progress(list(_basis_pairs(I, proper=True)), "curried", progress):
        rec.check("curried_homomorphism", f"{F}·{G}", lambda: (
            curried_arrow_series(mult(H(F), H(G)), r_max).components
            == series_product(curried_arrow_series(H(F), r_max), curried_arrow_series(H(G), r_max)).components
        ))

    report.elapsed = time.time() - started
    return report


# =============================================================================
# T-积
# =============================================================================

def toy_assignment(labels: Iterable, times: Iterable[int]) -> Dict:
    """标签 k 装饰为符号 A_k，时间按给定顺序"""
    return {l: Decoration(f"A{l}", Fraction(t)) for l, t in zip(sorted(labels), times)}


def run_products_suite(n: int = 2, seed: Optional[int] = None, progress: bool = False,
                       n_j: int = 3, **_) -> SuiteReport:
    """同态延拓、等变性、反演、李映射、𝒮⋆𝒮⁻¹ = 1、因果分解与 Tits 核"""
    started = time.time()
    report, rec = _start("products", seed, n=n, n_j=n_j)
    rng = random.Random(report.seed)
    I = _ground(n)
    times = list(range(1, n + 1))
    rng.shuffle(times)
    assignment = toy_assignment(I, times)
    P = ToyCausalSystem(0, n_j)

    for F, G in _progress(list(_basis_pairs(I)), "homomorphism", progress):
        rec.check("homomorphism", f"{F}·{G}", lambda: (
            P.evaluate(mult(H(F), H(G)), assignment) == P.evaluate(H(F), assignment) * P.evaluate(H(G), assignment)
        ))

    basis = list(enumerate_compositions(I))
    targets = [chr(ord("a") + k) for k in range(n)]
    rng.shuffle(targets)
    sigma = dict(zip(sorted(I), targets))
    moved = {sigma[l]: d for l, d in assignment.items()}
    for F in basis:
        rec.check("equivariance", str(F),
                  lambda: P.evaluate(relabel(H(F), sigma), moved) == P.evaluate(H(F), assignment))
        rec.check("inversion", str(F), lambda: all(P.evaluate(s, assignment).is_zero() for s in _inversion_sums(F)))

    for A, B in _decompositions(I):
        if not A or not B:
            continue
        z1, z2 = q_to_h(composition(A)), q_to_h(composition(B))
        rec.check("lie_map", f"[Q({sorted(A)}),Q({sorted(B)})]", lambda: (
            generalized_R(P, commutator(z1, z2), assignment)
            == generalized_R(P, z1, assignment) * generalized_R(P, z2, assignment)
            - generalized_R(P, z2, assignment) * generalized_R(P, z1, assignment)
        ))

    A_dec = Decoration("A", Fraction(1))
    one = TargetPoly.one(0, n_j)
    S, S_inv = t_exponential(P, A_dec, n_j=n_j), inverse_t_exponential(P, A_dec, n_j=n_j)
    rec.check("s_matrix_inverse", f"N_j={n_j}", lambda: S * S_inv == one and S_inv * S == one)

    for order in _progress(list(permutations(range(1, n + 1))), "causal", progress):
        local = toy_assignment(I, order)
        rec.check("causal_factorization", f"times={order}", lambda: verify_causal_factorization(P, I, local))
        for G in enumerate_compositions(I):
            if not respects(G, local):
                continue
            for a in tits_kernel_elements(I, G):
                rec.check("tits_kernel", f"times={order} G={G}", lambda: P.evaluate(a, local).is_zero())

    report.elapsed = time.time() - started
    return report


# =============================================================================
# 生成函数与 Bogoliubov 公式
# =============================================================================

def run_bogoliubov_suite(n: int = 1, seed: Optional[int] = None, progress: bool = False,
                         n_g: int = 2, n_j: int = 2, **_) -> SuiteReport:
    """𝒱、𝒲 恒等式，Bogoliubov 提取，微扰系统的同态性与真空稳定性"""
    started = time.time()
    report, rec = _start("bogoliubov", seed, n_g=n_g, n_j=n_j)
    rng = random.Random(report.seed)
    c = Coupling.quantum()
    P = ToyCausalSystem(n_g, n_j)
    interaction = Decoration("S", Fraction(0))
    A = Decoration("A", Fraction(rng.choice([-1, 1])))

    for direction in _progress(list(ArrowDirection), "generating", progress):
        rec.check("generating_function", direction.value, lambda: (
            generating_function(P, interaction, A, c, n_g, n_j, direction)
            == generating_function_rhs(P, interaction, A, c, n_g, n_j, direction)
        ))

    V = generating_function(P, interaction, A, c, n_g, n_j)
    perturbed = PerturbedSystem(P, interaction, n_g, c)
    rec.check("bogoliubov", f"N_g={n_g}", lambda: (
        bogoliubov_extract(V, c) == perturbed.component(["i"], {"i": A}).truncated(n_g, 0)
    ))
    rec.check("unperturbed", "N_g=0", lambda: (
        generating_function(P, interaction, A, c, 0, n_j) == t_exponential(P, A, c, n_j, 0)
    ))

    labels = ("a", "b")
    decorations = {"a": Decoration("A", Fraction(1)), "b": Decoration("B", Fraction(-1))}
    order = min(1, n_g)
    small = PerturbedSystem(P, interaction, order, c)
    for F in enumerate_compositions(labels):
        def direct(F=F):
            total = TargetPoly.zero(order, n_j)
            for r in range(order + 1):
                Y = fresh_labels(r)
                extended = {**decorations, **{y: interaction for y in Y}}
                weight = c.power(r).as_poly(order, n_j, g=r, weight=frac(1, factorial(r)))
                total = total + weight * P.evaluate(iterated_arrow(H(F), Y), extended).truncated(order, n_j)
            return total
        rec.check("perturbed_homomorphism", str(F), lambda: small.evaluate(H(F), decorations) == direct())

    chi = Character({"S": rng.randint(1, 5), "A": rng.randint(-3, 3), "B": 2})
    observable = TargetPoly.monomial(n_g, n_j, ("A", "B"), scalar(1, 1), 0, 0, 1)
    rec.check("vacuum_stability", str(chi.values.get("S")),
              lambda: verify_vacuum_stability(P, interaction, chi, observable, c, n_g))

    report.elapsed = time.time() - started
    return report


# =============================================================================
# 散射
# =============================================================================

SCATTERING_LAYOUTS = {
    2: [(1, 1)],
    3: [(2, 1), (1, 2)],
}


def run_scattering_suite(n: int = 3, seed: Optional[int] = None, progress: bool = False,
                         n_g: int = 2, **_) -> SuiteReport:
    """G_I = ⟨T_S ⋆ 𝒮(gS) ⋆ T_T⟩ / ⟨𝒮(gS)⟩，对 n = 2..n 的各种块划分"""
    started = time.time()
    report, rec = _start("scattering", seed, n=n, n_g=n_g)
    rng = random.Random(report.seed)
    c = Coupling.quantum()
    P = ToyCausalSystem(n_g, 0)
    interaction = Decoration("S", Fraction(0))
    cases = []
    for size in range(2, n + 1):
        for later, earlier in SCATTERING_LAYOUTS.get(size, [(size - 1, 1)]):
            labels = list(range(1, size + 1))
            rng.shuffle(labels)
            times = [Fraction(k + 1) for k in range(later)] + [Fraction(-(k + 1)) for k in range(earlier)]
            assignment = {l: Decoration(f"A{l}", t) for l, t in zip(labels, times)}
            cases.append((size, later, assignment))

    for size, later, assignment in _progress(cases, "scattering", progress):
        values = {d.symbol: rng.randint(-3, 3) or 1 for d in assignment.values()}
        for s_value in (rng.randint(1, 4), 0):
            chi = Character(dict(values, S=s_value))
            for order in sorted({0, n_g}):
                rec.check("scattering", f"n={size} later={later} χ(S)={s_value} N_g={order}",
                          lambda: scattering_check(P, interaction, assignment, chi, order, c))

    report.elapsed = time.time() - started
    return report


# =============================================================================
# 注册与输出
# =============================================================================

SUITES: Dict[str, Callable[..., SuiteReport]] = {
    "hopf": run_hopf_suite,
    "qbasis": run_qbasis_suite,
    "dynkin": run_dynkin_suite,
    "steinmann": run_steinmann_suite,
    "ruelle": run_ruelle_suite,
    "arrows": run_arrows_suite,
    "products": run_products_suite,
    "bogoliubov": run_bogoliubov_suite,
    "scattering": run_scattering_suite,
}


def run_suite(name: str, **params) -> SuiteReport:
    try:
        runner = SUITES[name]
    except KeyError:
        raise DomainError(f"未知的验证套件: {name}（可选: {', '.join(SUITES)}）") from None
    params = {k: v for k, v in params.items() if v is not None}
    report = runner(**params)
    logger.info(f"套件 {name}: {report.correct}/{report.total} 通过，耗时 {report.elapsed:.2f}秒")
    return report


def print_report(report: SuiteReport) -> None:
    print(f"=== 验证套件 {report.suite} (seed={report.seed}) ===")
    for key, value in report.params.items():
        print(f"{key}: {value}")
    for key, value in report.data.items():
        print(f"{key}: {value}")
    print(f"\n=== 按不变量统计 ===")
    for invariant, stats in report.counters().items():
        rate = stats["correct"] / stats["total"] if stats["total"] else 1.0
        mark = "✓" if stats["correct"] == stats["total"] else "✗"
        print(f"{mark} {invariant}: {stats['correct']}/{stats['total']} ({rate:.2%})")
    for failure in report.failures()[:20]:
        print(f"  ✗ [{failure.invariant}] {failure.case} {failure.detail}")
    print(f"\n总检查数: {report.total}")
    print(f"通过: {report.correct}")
    print(f"耗时: {report.elapsed:.3f}秒")


def export_report(report: SuiteReport, filename: str) -> None:
    """导出报告到 JSON 文件"""
    with open(filename, "wb") as f:
        f.write(orjson.dumps(report.to_json(), option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS))
    print(f"报告已导出到: {filename}")


def main() -> int:
    """按默认参数运行全部套件"""
    configure_logging()
    print("因果物种验证套件")
    print("=" * 60)
    passed = True
    for name in SUITES:
        result = run_suite(name)
        print_report(result)
        print("-" * 60)
        passed = passed and result.passed
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
