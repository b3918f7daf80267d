#!/usr/bin/env python3
"""
组合的余交换 Hopf 幺半群 Σ

Σ[I] 是以 I 的组合为基（H 基）的 ℚ(i) 线性空间。乘法为拼接，
余乘法为限制，对极由反序组合的细化的符号和给出。Q 基是 H 基的三角变换，
其中单块元素是本原元。
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from loguru import logger

from compositions import (
    EMPTY, Composition, FiniteSet, Label, composition_from_json, composition_to_json,
    concat, deshuffle, enumerate_refinements, factorial_ratio, finite_set, format_set,
    label_key, length_ratio, opposite, restrict, set_from_json, set_to_json,
    sort_compositions, sorted_labels, tits_product,
)
from errors import DisjointnessError, DomainError, ParseError
from scalars import ONE, ZERO, Scalar, ScalarLike, as_scalar, format_scalar, frac, scalar_from_json, scalar_to_json

Coproduct = Dict[Tuple[Composition, Composition], Scalar]

# 单个组合的对极与基变换缓存条目上限
BASIS_CACHE_SIZE = 8192


def _add_into(acc: Dict, key, c: Scalar) -> None:
    value = acc.get(key, ZERO) + c
    if value:
        acc[key] = value
    else:
        acc.pop(key, None)


@dataclass(frozen=True, eq=True)
class SigElement:
    """Σ[I] 中的元素：组合到系数的有限映射（零系数不存储）"""
    ground: FiniteSet
    terms: Dict[Composition, Scalar] = field(default_factory=dict)

    __hash__ = None

    def __post_init__(self):
        ground = finite_set(self.ground)
        clean: Dict[Composition, Scalar] = {}
        for F, c in self.terms.items():
            if F.ground != ground:
                raise DomainError(f"组合 {F} 的基础集合不是 {{{format_set(ground)}}}")
            _add_into(clean, F, as_scalar(c))
        object.__setattr__(self, "ground", ground)
        object.__setattr__(self, "terms", clean)

    # ----- 线性结构 -----

    def _check(self, other: "SigElement") -> None:
        if self.ground != other.ground:
            raise DomainError(f"基础集合不一致: {{{format_set(self.ground)}}} 与 {{{format_set(other.ground)}}}")

    def __add__(self, other: "SigElement") -> "SigElement":
        self._check(other)
        acc = dict(self.terms)
        for F, c in other.terms.items():
            _add_into(acc, F, c)
        return SigElement(self.ground, acc)

    def __sub__(self, other: "SigElement") -> "SigElement":
        return self + (-other)

    def __neg__(self) -> "SigElement":
        return SigElement(self.ground, {F: -c for F, c in self.terms.items()})

    def scale(self, c: ScalarLike) -> "SigElement":
        c = as_scalar(c)
        return SigElement(self.ground, {F: c * v for F, v in self.terms.items()})

    def __rmul__(self, c: ScalarLike) -> "SigElement":
        return self.scale(c)

    def __mul__(self, other):
        if isinstance(other, SigElement):
            return mult(self, other)
        return self.scale(other)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, F: Composition) -> Scalar:
        return self.terms.get(F, ZERO)

    def items(self) -> List[Tuple[Composition, Scalar]]:
        """按规范顺序列出非零项"""
        return [(F, self.terms[F]) for F in sort_compositions(self.terms)]

    def __iter__(self) -> Iterator[Tuple[Composition, Scalar]]:
        return iter(self.items())

    def __len__(self) -> int:
        return len(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for F, c in self.items():
            if c == ONE:
                coeff = ""
            elif c == -ONE:
                coeff = "-"
            else:
                coeff = format_scalar(c) if not c.y or not c.x else f"({format_scalar(c)})"
            parts.append(f"{coeff}H{F}")
        return " + ".join(parts).replace("+ -", "- ")


def H(F: Composition) -> SigElement:
    """H 基元素 H_F"""
    return SigElement(F.ground, {F: ONE})


def unit() -> SigElement:
    """单位元 H_()"""
    return H(EMPTY)


def zero(ground: Iterable[Label] = ()) -> SigElement:
    return SigElement(frozenset(ground), {})


def linear_combination(ground: Iterable[Label], pairs: Iterable[Tuple[ScalarLike, Composition]]) -> SigElement:
    acc: Dict[Composition, Scalar] = {}
    for c, F in pairs:
        _add_into(acc, F, as_scalar(c))
    return SigElement(frozenset(ground), acc)


def apply_linear(a: SigElement, image: Callable[[Composition], Mapping[Composition, Scalar]],
                 ground: Optional[Iterable[Label]] = None) -> SigElement:
    """把定义在 H 基上的映射线性延拓到 a"""
    acc: Dict[Composition, Scalar] = {}
    for F, c in a.terms.items():
        for G, v in image(F).items():
            _add_into(acc, G, c * v)
    return SigElement(a.ground if ground is None else frozenset(ground), acc)


# =============================================================================
# Hopf 结构
# =============================================================================

def mult(a: SigElement, b: SigElement) -> SigElement:
    """μ(H_F ⊗ H_G) = H_{FG}，双线性延拓"""
    if a.ground & b.ground:
        raise DisjointnessError(f"乘法要求基础集合不交: 公共标签 {format_set(a.ground & b.ground)}")
    acc: Dict[Composition, Scalar] = {}
    for F, c in a.terms.items():
        for G, d in b.terms.items():
            _add_into(acc, concat(F, G), c * d)
    return SigElement(a.ground | b.ground, acc)


def mult_many(factors: Iterable[SigElement]) -> SigElement:
    result = unit()
    for f in factors:
        result = mult(result, f)
    return result


def _check_decomposition(ground: FiniteSet, S: FiniteSet, T: FiniteSet) -> None:
    if S & T or (S | T) != ground:
        raise DomainError(f"({format_set(S)}|{format_set(T)}) 不是 {{{format_set(ground)}}} 的分解 S⊔T=I")


def comult(a: SigElement, S: Iterable[Label], T: Iterable[Label]) -> Coproduct:
    """Δ_{S,T}(H_F) = H_{F|S} ⊗ H_{F|T}，以 (组合, 组合) → 系数 的映射表示"""
    S, T = frozenset(S), frozenset(T)
    _check_decomposition(a.ground, S, T)
    acc: Coproduct = {}
    for F, c in a.terms.items():
        _add_into(acc, (restrict(F, S), restrict(F, T)), c)
    return acc


def tensor(a: SigElement, b: SigElement) -> Coproduct:
    """a ⊗ b 的分量映射"""
    acc: Coproduct = {}
    for F, c in a.terms.items():
        for G, d in b.terms.items():
            _add_into(acc, (F, G), c * d)
    return acc


def iterated_comult(a: SigElement, blocks: Iterable[Iterable[Label]]) -> Dict[Tuple[Composition, ...], Scalar]:
    """沿有序分块 (S1,...,Sk) 的迭代余乘法"""
    blocks = [frozenset(b) for b in blocks]
    union = frozenset().union(*blocks) if blocks else frozenset()
    if sum(len(b) for b in blocks) != len(union) or union != a.ground:
        raise DomainError(f"分块不是 {{{format_set(a.ground)}}} 的有序分解")
    acc: Dict[Tuple[Composition, ...], Scalar] = {}
    for F, c in a.terms.items():
        _add_into(acc, tuple(restrict(F, b) for b in blocks), c)
    return acc


def tensor_mult(components: Mapping[Tuple[Composition, ...], Scalar], ground: Iterable[Label]) -> SigElement:
    """把张量分量按顺序乘回 Σ"""
    acc: Dict[Composition, Scalar] = {}
    for parts, c in components.items():
        F = EMPTY
        for part in parts:
            F = concat(F, part)
        _add_into(acc, F, c)
    return SigElement(frozenset(ground), acc)


def counit(a: SigElement) -> Scalar:
    if a.ground:
        return ZERO
    return a.coefficient(EMPTY)


@lru_cache(maxsize=BASIS_CACHE_SIZE)
def _antipode_of(F: Composition) -> Dict[Composition, Scalar]:
    result: Dict[Composition, Scalar] = {}
    for G in enumerate_refinements(opposite(F)):
        result[G] = ONE if len(G) % 2 == 0 else -ONE
    return result


def antipode(a: SigElement) -> SigElement:
    """H̄_F = Σ_{G ≥ F̄} (-1)^{l(G)} H_G"""
    return apply_linear(a, _antipode_of)


# =============================================================================
# Q 基
# =============================================================================

@lru_cache(maxsize=BASIS_CACHE_SIZE)
def _q_in_h(F: Composition) -> Dict[Composition, Scalar]:
    result: Dict[Composition, Scalar] = {}
    for G in enumerate_refinements(F):
        sign = 1 if (len(G) - len(F)) % 2 == 0 else -1
        result[G] = frac(sign, length_ratio(G, F))
    return result


@lru_cache(maxsize=BASIS_CACHE_SIZE)
def _h_in_q(F: Composition) -> Dict[Composition, Scalar]:
    return {G: frac(1, factorial_ratio(G, F)) for G in enumerate_refinements(F)}


def q_to_h(F: Composition) -> SigElement:
    """Q_F 在 H 基下的展开: Σ_{G≥F} (-1)^{l(G)-l(F)} / l(G/F) · H_G"""
    return SigElement(F.ground, dict(_q_in_h(F)))


def h_to_q(F: Composition) -> SigElement:
    """H_F 在 Q 基下的坐标: Σ_{G≥F} 1/(G/F)! · Q_G（键解释为 Q 基）"""
    return SigElement(F.ground, dict(_h_in_q(F)))


Q = q_to_h


def to_q_coordinates(a: SigElement) -> SigElement:
    return apply_linear(a, _h_in_q)


def from_q_coordinates(a: SigElement) -> SigElement:
    return apply_linear(a, _q_in_h)


def q_comult(a_q: SigElement, S: Iterable[Label], T: Iterable[Label]) -> Coproduct:
    """Q 坐标下的余乘法：Q_F ↦ Q_{F↾S} ⊗ Q_{F↾T}（非块并时为零）"""
    S, T = frozenset(S), frozenset(T)
    _check_decomposition(a_q.ground, S, T)
    acc: Coproduct = {}
    for F, c in a_q.terms.items():
        left = deshuffle(F, S)
        if left is None:
            continue
        _add_into(acc, (left, restrict(F, T)), c)
    return acc


# =============================================================================
# 本原元、括号与作用
# =============================================================================

def proper_decompositions(ground: Iterable[Label]) -> Iterator[Tuple[FiniteSet, FiniteSet]]:
    """全部有序的真分解 (S,T)，S、T 非空"""
    labels = sorted_labels(ground)
    n = len(labels)
    for mask in range(1, (1 << n) - 1):
        S = frozenset(labels[i] for i in range(n) if mask >> i & 1)
        yield S, frozenset(labels) - S


def is_primitive(a: SigElement) -> bool:
    """对每个两块分解 (S,T)，Δ_{S,T}(a) = 0"""
    if not a.ground:
        raise DomainError("本原性检验要求基础集合非空")
    for S, T in proper_decompositions(a.ground):
        if comult(a, S, T):
            return False
    return True


def commutator(a: SigElement, b: SigElement) -> SigElement:
    """[a, b] = ab - ba"""
    return mult(a, b) - mult(b, a)


def hopf_power_action(a: SigElement, G: Composition) -> SigElement:
    """a ▷ H_G：H_F ↦ H_{F▷G}"""
    if a.ground != G.ground:
        raise DomainError(f"Tits 作用要求基础集合一致: {{{format_set(a.ground)}}} 与 {G}")
    return apply_linear(a, lambda F: {tits_product(F, G): ONE})


def hopf_power_by_coproduct(F: Composition, G: Composition) -> SigElement:
    """沿 F 的块对 H_G 做迭代余乘法再按序相乘"""
    return tensor_mult(iterated_comult(H(G), F.lumps), G.ground)


def relabel(a: SigElement, sigma: Mapping[Label, Label]) -> SigElement:
    """沿双射 σ 推出每个组合"""
    sigma = dict(sigma)
    if frozenset(sigma) != a.ground:
        raise DomainError(f"重标号映射的定义域应为 {{{format_set(a.ground)}}}")
    if len(set(sigma.values())) != len(sigma):
        raise DomainError("重标号映射不是双射")
    image = frozenset(sigma.values())
    return apply_linear(
        a,
        lambda F: {Composition(tuple(frozenset(sigma[l] for l in lump) for lump in F.lumps)): ONE},
        ground=image,
    )


# =============================================================================
# 装饰元素 Σ ⊗ E_V
# =============================================================================

Assignment = Tuple[Tuple[Label, str], ...]


def make_assignment(mapping: Mapping[Label, str]) -> Assignment:
    return tuple(sorted(dict(mapping).items(), key=lambda kv: label_key(kv[0])))


@dataclass(frozen=True, eq=True)
class DecoratedSigElement:
    """(组合, 装饰赋值) → 系数"""
    ground: FiniteSet
    terms: Dict[Tuple[Composition, Assignment], Scalar] = field(default_factory=dict)

    __hash__ = None

    def __post_init__(self):
        ground = finite_set(self.ground)
        clean: Dict[Tuple[Composition, Assignment], Scalar] = {}
        for (F, assign), c in self.terms.items():
            assign = make_assignment(dict(assign))
            if F.ground != ground or frozenset(l for l, _ in assign) != ground:
                raise DomainError(f"装饰项 {F} 的组合或赋值与基础集合不符")
            _add_into(clean, (F, assign), as_scalar(c))
        object.__setattr__(self, "ground", ground)
        object.__setattr__(self, "terms", clean)

    def __add__(self, other: "DecoratedSigElement") -> "DecoratedSigElement":
        if self.ground != other.ground:
            raise DomainError("装饰元素的基础集合不一致")
        acc = dict(self.terms)
        for key, c in other.terms.items():
            _add_into(acc, key, c)
        return DecoratedSigElement(self.ground, acc)

    def __neg__(self) -> "DecoratedSigElement":
        return DecoratedSigElement(self.ground, {k: -c for k, c in self.terms.items()})

    def scale(self, c: ScalarLike) -> "DecoratedSigElement":
        c = as_scalar(c)
        return DecoratedSigElement(self.ground, {k: c * v for k, v in self.terms.items()})

    def sig_part(self, assignment: Mapping[Label, str]) -> SigElement:
        """给定装饰赋值下的 Σ 分量"""
        target = make_assignment(assignment)
        return SigElement(self.ground, {F: c for (F, a), c in self.terms.items() if a == target})

    def assignments(self) -> List[Assignment]:
        return sorted({a for _, a in self.terms}, key=lambda a: [(label_key(l), s) for l, s in a])


def decorate(a: SigElement, assignment: Mapping[Label, str]) -> DecoratedSigElement:
    """a ⊗ A_I"""
    assign = make_assignment(assignment)
    return DecoratedSigElement(a.ground, {(F, assign): c for F, c in a.terms.items()})


def decorated_mult(a: DecoratedSigElement, b: DecoratedSigElement) -> DecoratedSigElement:
    if a.ground & b.ground:
        raise DisjointnessError(f"乘法要求基础集合不交: 公共标签 {format_set(a.ground & b.ground)}")
    acc: Dict = {}
    for (F, x), c in a.terms.items():
        for (G, y), d in b.terms.items():
            _add_into(acc, (concat(F, G), make_assignment(dict(x + y))), c * d)
    return DecoratedSigElement(a.ground | b.ground, acc)


def decorated_comult(a: DecoratedSigElement, S: Iterable[Label], T: Iterable[Label]) -> Dict:
    """分量为 ((F|S, A|S), (F|T, A|T)) → 系数"""
    S, T = frozenset(S), frozenset(T)
    _check_decomposition(a.ground, S, T)
    acc: Dict = {}
    for (F, assign), c in a.terms.items():
        left = (restrict(F, S), tuple((l, s) for l, s in assign if l in S))
        right = (restrict(F, T), tuple((l, s) for l, s in assign if l in T))
        _add_into(acc, (left, right), c)
    return acc


def decorated_antipode(a: DecoratedSigElement) -> DecoratedSigElement:
    """s_I(H_F ⊗ A_I) = H̄_F ⊗ A_I"""
    acc: Dict = {}
    for (F, assign), c in a.terms.items():
        for G, v in _antipode_of(F).items():
            _add_into(acc, (G, assign), c * v)
    return DecoratedSigElement(a.ground, acc)


# =============================================================================
# JSON
# =============================================================================

def sig_to_json(a: SigElement) -> Dict:
    return {
        "ground": set_to_json(a.ground),
        "terms": [{"comp": composition_to_json(F), "coeff": scalar_to_json(c)} for F, c in a.items()],
    }


def sig_from_json(obj: Mapping) -> SigElement:
    try:
        ground = set_from_json(obj["ground"])
        pairs = [(scalar_from_json(t["coeff"]), composition_from_json(t["comp"])) for t in obj["terms"]]
    except (KeyError, TypeError) as e:
        raise ParseError(f"SigElement JSON 缺少字段: {e}") from e
    return linear_combination(ground, pairs)


def clear_caches() -> None:
    for cached in (_antipode_of, _q_in_h, _h_in_q):
        cached.cache_clear()
    logger.debug("已清空 Σ 的基变换缓存")
