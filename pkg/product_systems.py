#!/usr/bin/env python3
"""
T-积系统与微扰

目标代数用自由字代数代替：系数按 (字, ℏ 幂, g 幂, j 幂) 存储，
乘法为字的拼接。T-积系统由单块分量 T_I(H_(I) ⊗ A_I) 给出，
同态延拓到整个 Σ；在 Zie 上的限制给出广义 R-积。

玩具因果模型：装饰带有时间坐标，T_I 把符号按时间从晚到早排成一个字。
真空态取为目标代数的特征标。
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from loguru import logger

from compositions import (
    Composition, FiniteSet, FreshLabel, Label, enumerate_compositions, finite_set, format_set,
    label_key, sorted_labels, tits_product,
)
from config import check_bound, get_settings
from errors import (
    DisjointnessError, DomainError, MalformedVertexMapError, NonRespectingConfigurationError,
    NotPrimitiveError, SeriesDivisionError, TruncationError, UnknownDecorationError,
)
from scalars import (
    ONE, I_UNIT, Scalar, ScalarLike, as_scalar, frac, format_scalar, scalar_from_json, scalar_to_json,
)
from species_algebra import H, SigElement, _add_into, antipode, hopf_power_action, is_primitive
from steinmann_arrows import ArrowDirection, _direction, advanced_element, fresh_labels, one_lump, retarded_element
from zie_cells import ZieElement

Word = Tuple[str, ...]
PolyKey = Tuple[Word, int, int, int]     # (字, ℏ 幂, g 幂, j 幂)


# =============================================================================
# 装饰
# =============================================================================

@dataclass(frozen=True)
class Decoration:
    """局部可观测量的替身：符号与玩具时间坐标"""
    symbol: str
    time: Fraction = Fraction(0)

    def __post_init__(self):
        if not self.symbol:
            raise UnknownDecorationError("装饰符号不能为空")
        object.__setattr__(self, "time", Fraction(self.time))

    def __str__(self) -> str:
        return f"{self.symbol}@{self.time}"


class DecorationRegistry:
    """符号 → 装饰；符号唯一"""

    def __init__(self, decorations: Iterable[Decoration] = ()):
        self._by_symbol: Dict[str, Decoration] = {}
        for d in decorations:
            self.register(d)

    def register(self, decoration: Decoration) -> Decoration:
        existing = self._by_symbol.get(decoration.symbol)
        if existing is not None and existing != decoration:
            raise UnknownDecorationError(f"符号 {decoration.symbol} 已注册为不同的装饰")
        self._by_symbol[decoration.symbol] = decoration
        return decoration

    def __getitem__(self, symbol: str) -> Decoration:
        try:
            return self._by_symbol[symbol]
        except KeyError:
            raise UnknownDecorationError(f"未注册的装饰符号: {symbol}") from None

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._by_symbol

    def symbols(self) -> List[str]:
        return sorted(self._by_symbol)


Assignment = Mapping[Label, Decoration]


def has_time_ties(assignment: Assignment) -> bool:
    """是否有不同符号的装饰时间相同"""
    seen: Dict[Fraction, str] = {}
    for d in assignment.values():
        other = seen.setdefault(d.time, d.symbol)
        if other != d.symbol:
            return True
    return False


# =============================================================================
# 目标代数：截断的非交换级数
# =============================================================================

@dataclass(frozen=True)
class TargetPoly:
    """F((ℏ))[[g,j]] 的自由字替身，g、j 分别截断到 n_g、n_j 阶"""
    n_g: int
    n_j: int
    terms: Dict[PolyKey, Scalar] = field(default_factory=dict)

    __hash__ = None

    def __post_init__(self):
        if self.n_g < 0 or self.n_j < 0:
            raise TruncationError("截断阶数不能为负")
        clean: Dict[PolyKey, Scalar] = {}
        for (word, hbar, g, j), c in self.terms.items():
            if g < 0 or j < 0:
                raise TruncationError("g、j 的幂不能为负")
            if g > self.n_g or j > self.n_j:
                continue
            _add_into(clean, (tuple(word), int(hbar), int(g), int(j)), as_scalar(c))
        object.__setattr__(self, "terms", clean)

    # ----- 构造 -----

    @classmethod
    def zero(cls, n_g: int, n_j: int) -> "TargetPoly":
        return cls(n_g, n_j, {})

    @classmethod
    def one(cls, n_g: int, n_j: int) -> "TargetPoly":
        return cls(n_g, n_j, {((), 0, 0, 0): ONE})

    @classmethod
    def monomial(cls, n_g: int, n_j: int, word: Sequence[str] = (), coeff: ScalarLike = 1,
                 hbar: int = 0, g: int = 0, j: int = 0) -> "TargetPoly":
        return cls(n_g, n_j, {(tuple(word), hbar, g, j): as_scalar(coeff)})

    # ----- 代数运算 -----

    def truncated(self, n_g: int, n_j: int) -> "TargetPoly":
        return TargetPoly(min(n_g, self.n_g), min(n_j, self.n_j), self.terms)

    def __add__(self, other: "TargetPoly") -> "TargetPoly":
        acc = dict(self.terms)
        for key, c in other.terms.items():
            _add_into(acc, key, c)
        return TargetPoly(min(self.n_g, other.n_g), min(self.n_j, other.n_j), acc)

    def __neg__(self) -> "TargetPoly":
        return TargetPoly(self.n_g, self.n_j, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "TargetPoly") -> "TargetPoly":
        return self + (-other)

    def scale(self, c: ScalarLike) -> "TargetPoly":
        c = as_scalar(c)
        return TargetPoly(self.n_g, self.n_j, {k: c * v for k, v in self.terms.items()})

    def __mul__(self, other: "TargetPoly") -> "TargetPoly":
        """⋆ 积：字拼接，幂次相加，超出截断的项丢弃"""
        n_g, n_j = min(self.n_g, other.n_g), min(self.n_j, other.n_j)
        acc: Dict[PolyKey, Scalar] = {}
        for (w1, h1, g1, j1), c in self.terms.items():
            for (w2, h2, g2, j2), d in other.terms.items():
                if g1 + g2 > n_g or j1 + j2 > n_j:
                    continue
                _add_into(acc, (w1 + w2, h1 + h2, g1 + g2, j1 + j2), c * d)
        return TargetPoly(n_g, n_j, acc)

    def constant_part(self) -> Dict[Tuple[Word, int], Scalar]:
        return {(w, h): c for (w, h, g, j), c in self.terms.items() if g == 0 and j == 0}

    def inverse(self) -> "TargetPoly":
        """几何级数求逆，要求 (g,j) 常数项恰为 1"""
        if self.constant_part() != {((), 0): ONE}:
            raise SeriesDivisionError("级数除法要求 (g,j) 常数项恰为 1")
        one = TargetPoly.one(self.n_g, self.n_j)
        minus_x = one - self
        result, power = one, one
        for _ in range(self.n_g + self.n_j):
            power = power * minus_x
            result = result + power
        return result

    def j_coefficient(self, k: int) -> "TargetPoly":
        """j^k 的系数，结果的 j 截断为 0"""
        if k > self.n_j:
            raise TruncationError(f"j 截断阶 {self.n_j} 小于 {k}")
        return TargetPoly(self.n_g, 0, {(w, h, g, 0): c for (w, h, g, j), c in self.terms.items() if j == k})

    def g_coefficient(self, k: int) -> "TargetPoly":
        if k > self.n_g:
            raise TruncationError(f"g 截断阶 {self.n_g} 小于 {k}")
        return TargetPoly(0, self.n_j, {(w, h, 0, j): c for (w, h, g, j), c in self.terms.items() if g == k})

    def is_scalar_series(self) -> bool:
        return all(not w for (w, _, _, _) in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> List[Tuple[PolyKey, Scalar]]:
        return sorted(self.terms.items(), key=lambda kv: (kv[0][2], kv[0][3], kv[0][1], kv[0][0]))

    def to_json(self) -> Dict:
        return {
            "trunc": {"j": self.n_j, "g": self.n_g},
            "terms": [
                {"word": list(w), "hbar": h, "g": g, "j": j, "coeff": scalar_to_json(c)}
                for (w, h, g, j), c in self.sorted_terms()
            ],
        }

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (w, h, g, j), c in self.sorted_terms():
            factors = [f"({format_scalar(c)})"]
            if h:
                factors.append(f"ℏ^{h}")
            if g:
                factors.append(f"g^{g}")
            if j:
                factors.append(f"j^{j}")
            factors.append("[" + " ".join(w) + "]")
            parts.append("·".join(factors))
        return " + ".join(parts)


def target_poly_from_json(obj: Mapping) -> TargetPoly:
    trunc = obj.get("trunc", {})
    terms = {}
    for t in obj.get("terms", []):
        terms[(tuple(t["word"]), int(t["hbar"]), int(t["g"]), int(t["j"]))] = scalar_from_json(t["coeff"])
    return TargetPoly(int(trunc.get("g", 0)), int(trunc.get("j", 0)), terms)


@dataclass(frozen=True)
class Coupling:
    """常数 c = coeff · ℏ^hbar；默认 c = 1/(iℏ) = (-i)ℏ^{-1}"""
    coeff: Scalar
    hbar: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeff", as_scalar(self.coeff))
        if not self.coeff:
            raise SeriesDivisionError("耦合常数不能为零")

    @classmethod
    def quantum(cls) -> "Coupling":
        return cls(-I_UNIT, -1)

    @classmethod
    def unity(cls) -> "Coupling":
        return cls(ONE, 0)

    def power(self, n: int) -> "Coupling":
        base = self if n >= 0 else self.inverse()
        coeff = ONE
        for _ in range(abs(n)):
            coeff = coeff * base.coeff
        return Coupling(coeff, base.hbar * abs(n))

    def inverse(self) -> "Coupling":
        return Coupling(ONE / self.coeff, -self.hbar)

    def as_poly(self, n_g: int, n_j: int, g: int = 0, j: int = 0, weight: ScalarLike = 1) -> TargetPoly:
        return TargetPoly.monomial(n_g, n_j, (), as_scalar(weight) * self.coeff, self.hbar, g, j)


def _check_order(P: "ProductSystem", n_g: int, n_j: int) -> None:
    """请求的截断阶不能超过底层系统自身的截断阶"""
    if n_g > P.n_g or n_j > P.n_j:
        raise TruncationError(
            f"请求的截断阶 (N_g={n_g}, N_j={n_j}) 超过底层系统的 (N_g={P.n_g}, N_j={P.n_j})"
        )


def _coupling(c: Optional[Coupling]) -> Coupling:
    return Coupling.quantum() if c is None else c


# =============================================================================
# T-积系统
# =============================================================================

class ProductSystem(ABC):
    """单块分量 T_I(H_(I) ⊗ A_I) 加上同态延拓规则"""

    def __init__(self, n_g: Optional[int] = None, n_j: Optional[int] = None):
        default = get_settings().default_truncation
        self.n_g = default if n_g is None else n_g
        self.n_j = default if n_j is None else n_j
        bound = get_settings().series_bound
        check_bound(self.n_g, bound, "N_g")
        check_bound(self.n_j, bound, "N_j")
        self._cache: Dict[Tuple, TargetPoly] = {}
        self.stats = {"components": 0, "cache_hits": 0}

    @abstractmethod
    def _component(self, labels: Tuple[Label, ...], decorations: Tuple[Decoration, ...]) -> TargetPoly:
        """labels 按规范顺序，decorations 与之一一对应"""

    def component(self, labels: Iterable[Label], assignment: Assignment) -> TargetPoly:
        """T_I(H_(I) ⊗ A_I)"""
        ordered = sorted_labels(labels)
        if not ordered:
            return TargetPoly.one(self.n_g, self.n_j)
        try:
            decorations = tuple(assignment[l] for l in ordered)
        except KeyError as e:
            raise UnknownDecorationError(f"标签 {e.args[0]} 没有装饰") from None
        key = (ordered, decorations)
        cached = self._cache.get(key)
        if cached is not None:
            self.stats["cache_hits"] += 1
            return cached
        self.stats["components"] += 1
        value = self._component(ordered, decorations)
        self._cache[key] = value
        return value

    def evaluate(self, a: SigElement, assignment: Assignment) -> TargetPoly:
        """T_I(H_F ⊗ A_I) = T(S1) ⋆ ... ⋆ T(Sk)，线性延拓"""
        missing = a.ground - frozenset(assignment)
        if missing:
            raise UnknownDecorationError(f"标签 {format_set(missing)} 没有装饰")
        total = TargetPoly.zero(self.n_g, self.n_j)
        for F, c in a.terms.items():
            value = TargetPoly.one(self.n_g, self.n_j)
            for lump in F.lumps:
                value = value * self.component(lump, assignment)
            total = total + value.scale(c)
        return total

    def reverse(self, a: SigElement, assignment: Assignment) -> TargetPoly:
        """T̄ = T ∘ s"""
        return self.evaluate(antipode(a), assignment)


class ToyCausalSystem(ProductSystem):
    """玩具因果模型：按时间从晚到早排成一个字"""

    def _component(self, labels, decorations):
        indexed = list(zip(labels, decorations))
        indexed.sort(key=lambda item: (-item[1].time, label_key(item[0])))
        if has_time_ties(dict(indexed)):
            logger.warning(f"装饰时间相同（非一般位置），按标签顺序排列: {[str(d) for _, d in indexed]}")
        word = tuple(d.symbol for _, d in indexed)
        return TargetPoly.monomial(self.n_g, self.n_j, word)


def toy_T_component(I: Iterable[Label], assignment: Assignment,
                    n_g: Optional[int] = None, n_j: Optional[int] = None) -> TargetPoly:
    return ToyCausalSystem(n_g, n_j).component(I, assignment)


def extend_to_generalized(P: ProductSystem, a: SigElement, assignment: Assignment) -> TargetPoly:
    """广义 T-积"""
    return P.evaluate(a, assignment)


def reverse_products(P: ProductSystem, a: SigElement, assignment: Assignment) -> TargetPoly:
    """反向 T-积：先作用对极"""
    return P.reverse(a, assignment)


def generalized_R(P: ProductSystem, z: Union[ZieElement, SigElement], assignment: Assignment) -> TargetPoly:
    """广义 R-积：T 在 Zie 上的限制"""
    if isinstance(z, SigElement):
        if not is_primitive(z):
            raise NotPrimitiveError(f"广义 R-积要求本原元输入: {z}")
        z = ZieElement(z)
    return P.evaluate(z.element, assignment)


def _merge(y_decorations: Assignment, i_decorations: Assignment) -> Dict[Label, Decoration]:
    overlap = frozenset(y_decorations) & frozenset(i_decorations)
    if overlap:
        raise DisjointnessError(f"Y 与 I 的标签重叠: {format_set(overlap)}")
    merged = dict(i_decorations)
    merged.update(y_decorations)
    return merged


def r_product(P: ProductSystem, y_decorations: Assignment, i_decorations: Assignment) -> TargetPoly:
    """R_{Y;I} = Σ T̄(Y1) ⋆ T(Y2⊔I)"""
    merged = _merge(y_decorations, i_decorations)
    return P.evaluate(retarded_element(y_decorations.keys(), i_decorations.keys()), merged)


def a_product(P: ProductSystem, y_decorations: Assignment, i_decorations: Assignment) -> TargetPoly:
    """A_{Y;I} = Σ T(Y1⊔I) ⋆ T̄(Y2)"""
    merged = _merge(y_decorations, i_decorations)
    return P.evaluate(advanced_element(y_decorations.keys(), i_decorations.keys()), merged)


# =============================================================================
# T-指数与 S-矩阵
# =============================================================================

def t_exponential_of_sum(P: ProductSystem, terms: Sequence[Tuple[Decoration, str]], coupling: Optional[Coupling] = None,
                         n_g: int = 0, n_j: int = 0, reverse: bool = False) -> TargetPoly:
    """𝒮(Σ x_k D_k) = Σ_n c^n/n! T_n((Σ x_k D_k)^n)，x_k ∈ {g, j}；按全部装饰方式求和"""
    c = _coupling(coupling)
    bound = get_settings().series_bound
    check_bound(n_g, bound, "N_g")
    check_bound(n_j, bound, "N_j")
    _check_order(P, n_g, n_j)
    for _, var in terms:
        if var not in ("g", "j"):
            raise DomainError(f"形式变量只能是 g 或 j: {var!r}")
    has_g = any(var == "g" for _, var in terms)
    has_j = any(var == "j" for _, var in terms)
    top = (n_g if has_g else 0) + (n_j if has_j else 0)
    result = TargetPoly.zero(n_g, n_j)
    for n in range(top + 1):
        labels = fresh_labels(n)
        element = one_lump(labels)
        if reverse:
            element = antipode(element)
        weight = c.power(n).as_poly(n_g, n_j, weight=frac(1, factorial(n)))
        for choice in product(terms, repeat=n):
            g_pow = sum(1 for _, var in choice if var == "g")
            j_pow = n - g_pow
            if g_pow > n_g or j_pow > n_j:
                continue
            assignment = {l: d for l, (d, _) in zip(labels, choice)}
            value = P.evaluate(element, assignment).truncated(n_g, n_j)
            monomial = TargetPoly.monomial(n_g, n_j, (), 1, 0, g_pow, j_pow)
            result = result + weight * monomial * value
    return result


def t_exponential(P: ProductSystem, A: Decoration, coupling: Optional[Coupling] = None,
                  n_j: Optional[int] = None, n_g: int = 0) -> TargetPoly:
    """𝒮(jA) = Σ_n j^n c^n/n! T_n(A^n)"""
    n_j = get_settings().default_truncation if n_j is None else n_j
    return t_exponential_of_sum(P, [(A, "j")], coupling, n_g, n_j)


def inverse_t_exponential(P: ProductSystem, A: Decoration, coupling: Optional[Coupling] = None,
                          n_j: Optional[int] = None, n_g: int = 0) -> TargetPoly:
    """𝒮⁻¹(jA) = Σ_n j^n c^n/n! T̄_n(A^n)"""
    n_j = get_settings().default_truncation if n_j is None else n_j
    return t_exponential_of_sum(P, [(A, "j")], coupling, n_g, n_j, reverse=True)


# =============================================================================
# 微扰
# =============================================================================

class PerturbedSystem(ProductSystem):
    """T̃_I = Σ_{r ≤ N_g} (gc)^r/r! R_{r;I}(S^r; A_I)"""

    def __init__(self, base: ProductSystem, interaction: Decoration, n_g: Optional[int] = None,
                 coupling: Optional[Coupling] = None, direction=ArrowDirection.RETARDED):
        super().__init__(base.n_g if n_g is None else n_g, base.n_j)
        _check_order(base, self.n_g, self.n_j)
        self.base = base
        self.interaction = interaction
        self.coupling = _coupling(coupling)
        self.direction = _direction(direction)

    def _component(self, labels, decorations):
        offset = max((l.index for l in labels if isinstance(l, FreshLabel)), default=0)
        assignment = dict(zip(labels, decorations))
        total = TargetPoly.zero(self.n_g, self.n_j)
        for r in range(self.n_g + 1):
            Y = fresh_labels(r, offset)
            if self.direction is ArrowDirection.RETARDED:
                element = retarded_element(Y, labels)
            else:
                element = advanced_element(Y, labels)
            extended = dict(assignment)
            extended.update({y: self.interaction for y in Y})
            value = self.base.evaluate(element, extended).truncated(self.n_g, self.n_j)
            weight = self.coupling.power(r).as_poly(self.n_g, self.n_j, g=r, weight=frac(1, factorial(r)))
            total = total + weight * value
        return total


def perturbed_system(P: ProductSystem, interaction: Decoration, n_g: Optional[int] = None,
                     coupling: Optional[Coupling] = None, direction=ArrowDirection.RETARDED) -> PerturbedSystem:
    return PerturbedSystem(P, interaction, n_g, coupling, direction)


def generating_function(P: ProductSystem, interaction: Decoration, A: Decoration, coupling: Optional[Coupling] = None,
                        n_g: Optional[int] = None, n_j: Optional[int] = None,
                        direction=ArrowDirection.RETARDED) -> TargetPoly:
    """𝒱（推迟）或 𝒲（超前）：Σ_{r,n} g^r j^n c^{r+n}/(r!n!) R_{r;n}(S^r; A^n)"""
    n_g = P.n_g if n_g is None else n_g
    n_j = P.n_j if n_j is None else n_j
    perturbed = PerturbedSystem(P, interaction, n_g, coupling, direction)
    return t_exponential_of_sum(perturbed, [(A, "j")], coupling, n_g, n_j)


def generating_function_rhs(P: ProductSystem, interaction: Decoration, A: Decoration,
                            coupling: Optional[Coupling] = None, n_g: Optional[int] = None,
                            n_j: Optional[int] = None, direction=ArrowDirection.RETARDED) -> TargetPoly:
    """𝒱 = 𝒮⁻¹(gS) ⋆ 𝒮(gS + jA)；𝒲 = 𝒮(gS + jA) ⋆ 𝒮⁻¹(gS)"""
    n_g = P.n_g if n_g is None else n_g
    n_j = P.n_j if n_j is None else n_j
    inverse = t_exponential_of_sum(P, [(interaction, "g")], coupling, n_g, n_j, reverse=True)
    mixed = t_exponential_of_sum(P, [(interaction, "g"), (A, "j")], coupling, n_g, n_j)
    if _direction(direction) is ArrowDirection.RETARDED:
        return inverse * mixed
    return mixed * inverse


def generating_function_w(P: ProductSystem, interaction: Decoration, A: Decoration,
                          coupling: Optional[Coupling] = None, n_g: Optional[int] = None,
                          n_j: Optional[int] = None) -> TargetPoly:
    """𝒲：超前箭头的生成函数"""
    return generating_function(P, interaction, A, coupling, n_g, n_j, ArrowDirection.ADVANCED)


def verify_generating_function(P: ProductSystem, interaction: Decoration, A: Decoration,
                               coupling: Optional[Coupling] = None, n_g: Optional[int] = None,
                               n_j: Optional[int] = None, direction=ArrowDirection.RETARDED) -> bool:
    lhs = generating_function(P, interaction, A, coupling, n_g, n_j, direction)
    rhs = generating_function_rhs(P, interaction, A, coupling, n_g, n_j, direction)
    return lhs == rhs


def bogoliubov_extract(series: TargetPoly, coupling: Optional[Coupling] = None) -> TargetPoly:
    """T̃_i(A) = (1/c) d/dj|_{j=0} 𝒱"""
    if series.n_j < 1:
        raise TruncationError("Bogoliubov 公式要求 j 的截断阶至少为 1")
    c_inv = _coupling(coupling).inverse()
    return c_inv.as_poly(series.n_g, 0) * series.j_coefficient(1)


# =============================================================================
# 因果分解
# =============================================================================

def respects(G: Composition, assignment: Assignment) -> bool:
    """G 中靠左的块的时间严格晚于靠右的块"""
    for p, left in enumerate(G.lumps):
        for right in G.lumps[p + 1:]:
            for i1 in left:
                for i2 in right:
                    if not assignment[i1].time > assignment[i2].time:
                        return False
    return True


def verify_causal_factorization(P: ProductSystem, I: Iterable[Label], assignment: Assignment) -> bool:
    """对每个被尊重的 G 与每个 H 基元素：T(a) = T(a ▷ H_G)"""
    I = finite_set(I)
    restricted = {l: assignment[l] for l in I}
    if len({d.time for d in restricted.values()}) != len(restricted):
        raise NonRespectingConfigurationError("因果分解检验要求装饰时间两两不同")
    compositions = list(enumerate_compositions(I))
    for G in compositions:
        if not respects(G, restricted):
            continue
        for F in compositions:
            a = H(F)
            if P.evaluate(a, restricted) != P.evaluate(hopf_power_action(a, G), restricted):
                logger.info(f"因果分解失败: F={F}, G={G}")
                return False
    return True


def tits_kernel_elements(I: Iterable[Label], G: Composition) -> List[SigElement]:
    """形如 H_F - H_F' 且 F▷G = F'▷G 的元素，满足 a ▷ H_G = 0"""
    buckets: Dict[Composition, List[Composition]] = {}
    for F in enumerate_compositions(I):
        buckets.setdefault(tits_product(F, G), []).append(F)
    result = []
    for group in buckets.values():
        for F, F2 in zip(group, group[1:]):
            result.append(H(F) - H(F2))
    return result


# =============================================================================
# 真空态与散射
# =============================================================================

@dataclass(frozen=True)
class Character:
    """装饰符号 → 标量，沿字乘性延拓"""
    values: Dict[str, Scalar]

    __hash__ = None

    def __post_init__(self):
        object.__setattr__(self, "values", {s: as_scalar(v) for s, v in dict(self.values).items()})

    def of_word(self, word: Word) -> Scalar:
        result = ONE
        for symbol in word:
            try:
                result = result * self.values[symbol]
            except KeyError:
                raise UnknownDecorationError(f"特征标在符号 {symbol} 上没有取值") from None
        return result


def vacuum_expectation(chi: Character, p: TargetPoly) -> TargetPoly:
    """⟨p⟩：逐字作用特征标，按 (ℏ,g,j) 幂收集"""
    acc: Dict[PolyKey, Scalar] = {}
    for (w, h, g, j), c in p.terms.items():
        _add_into(acc, ((), h, g, j), c * chi.of_word(w))
    return TargetPoly(p.n_g, p.n_j, acc)


def verify_vacuum_stability(P: ProductSystem, interaction: Decoration, chi: Character, observable: TargetPoly,
                            coupling: Optional[Coupling] = None, n_g: Optional[int] = None) -> bool:
    """⟨O ⋆ 𝒮(gS)⟩ = ⟨O⟩⟨𝒮(gS)⟩ 且 ⟨𝒮(gS) ⋆ O⟩ = ⟨𝒮(gS)⟩⟨O⟩"""
    n_g = P.n_g if n_g is None else n_g
    S = t_exponential_of_sum(P, [(interaction, "g")], coupling, n_g, observable.n_j)
    vs, vo = vacuum_expectation(chi, S), vacuum_expectation(chi, observable)
    left = vacuum_expectation(chi, observable * S) == vo * vs
    right = vacuum_expectation(chi, S * observable) == vs * vo
    return left and right


def green_function(P: ProductSystem, interaction: Decoration, assignment: Assignment, chi: Character,
                   n_g: Optional[int] = None, coupling: Optional[Coupling] = None) -> TargetPoly:
    """G_I = ⟨T̃_I(A_I)⟩"""
    perturbed = PerturbedSystem(P, interaction, n_g, coupling)
    return vacuum_expectation(chi, perturbed.component(assignment.keys(), assignment))


def scattering_blocks(interaction: Decoration, assignment: Assignment) -> Tuple[FiniteSet, FiniteSet]:
    """按相互作用时间把标签分成较晚的 S 块与较早的 T 块"""
    later = frozenset(l for l, d in assignment.items() if d.time > interaction.time)
    earlier = frozenset(l for l, d in assignment.items() if d.time < interaction.time)
    if later | earlier != frozenset(assignment):
        raise NonRespectingConfigurationError("相互作用时间必须严格位于两块之间")
    return later, earlier


def scattering_rhs(P: ProductSystem, interaction: Decoration, assignment: Assignment, chi: Character,
                   n_g: Optional[int] = None, coupling: Optional[Coupling] = None) -> TargetPoly:
    """⟨T_S(A_S) ⋆ 𝒮(gS) ⋆ T_T(A_T)⟩ / ⟨𝒮(gS)⟩"""
    n_g = P.n_g if n_g is None else n_g
    later, earlier = scattering_blocks(interaction, assignment)
    S = t_exponential_of_sum(P, [(interaction, "g")], coupling, n_g, P.n_j)
    numerator = P.component(later, assignment) * S * P.component(earlier, assignment)
    return vacuum_expectation(chi, numerator) * vacuum_expectation(chi, S).inverse()


def scattering_check(P: ProductSystem, interaction: Decoration, assignment: Assignment, chi: Character,
                     n_g: Optional[int] = None, coupling: Optional[Coupling] = None) -> bool:
    lhs = green_function(P, interaction, assignment, chi, n_g, coupling)
    rhs = scattering_rhs(P, interaction, assignment, chi, n_g, coupling)
    return lhs == rhs


# =============================================================================
# 顶点映射
# =============================================================================

def set_partitions(items: Sequence) -> Iterator[List[Tuple]]:
    """有限序列的全部无序集合划分，块内保持原顺序"""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in set_partitions(rest):
        yield [(first,)] + partition
        for k in range(len(partition)):
            yield partition[:k] + [(first,) + partition[k]] + partition[k + 1:]


Combination = Dict[Decoration, Scalar]


class VertexMap:
    """Z_S：装饰多重集 → 装饰的线性组合；单点默认恒等，未给出的多点为零"""

    def __init__(self, rules: Optional[Mapping[Tuple[str, ...], Sequence[Tuple[ScalarLike, Decoration]]]] = None):
        self.rules: Dict[Tuple[str, ...], Combination] = {}
        for key, combination in (rules or {}).items():
            key = tuple(sorted(key))
            if not key:
                raise MalformedVertexMapError("顶点映射不能定义在空集上")
            acc: Combination = {}
            for c, d in combination:
                _add_into(acc, d, as_scalar(c))
            if len(key) == 1 and len(acc) != 1:
                raise MalformedVertexMapError(f"单点顶点映射 {key[0]} 必须是单个装饰的非零倍数")
            self.rules[key] = acc

    def apply(self, decorations: Sequence[Decoration]) -> Combination:
        if not decorations:
            raise MalformedVertexMapError("顶点映射不能作用于空集")
        key = tuple(sorted(d.symbol for d in decorations))
        if key in self.rules:
            return dict(self.rules[key])
        if len(decorations) == 1:
            return {decorations[0]: ONE}
        return {}

    def compose(self, inner: "VertexMap") -> "ComposedVertexMap":
        """(Z∘Z')_S = Σ_Q Z(Z'_{Q1}, ..., Z'_{Qk})；先作用 inner"""
        return ComposedVertexMap(self, inner)


class ComposedVertexMap(VertexMap):
    def __init__(self, outer: VertexMap, inner: VertexMap):
        super().__init__()
        self.outer = outer
        self.inner = inner

    def apply(self, decorations: Sequence[Decoration]) -> Combination:
        if not decorations:
            raise MalformedVertexMapError("顶点映射不能作用于空集")
        acc: Combination = {}
        for partition in set_partitions(list(decorations)):
            images = [self.inner.apply(block) for block in partition]
            for choice in product(*[list(img.items()) for img in images]):
                weight = ONE
                for _, c in choice:
                    weight = weight * c
                for d, v in self.outer.apply([d for d, _ in choice]).items():
                    _add_into(acc, d, weight * v)
        return acc


class VertexRenormalizedSystem(ProductSystem):
    """T'_I(A_I) = Σ_P T_P(Z_{S1}(A_{S1}) ... Z_{Sk}(A_{Sk}))"""

    def __init__(self, base: ProductSystem, vertex_map: VertexMap):
        super().__init__(base.n_g, base.n_j)
        self.base = base
        self.vertex_map = vertex_map

    def _component(self, labels, decorations):
        index = dict(zip(labels, decorations))
        total = TargetPoly.zero(self.n_g, self.n_j)
        for partition in set_partitions(list(labels)):
            reps = [block[0] for block in partition]
            images = [self.vertex_map.apply([index[l] for l in block]) for block in partition]
            for choice in product(*[list(img.items()) for img in images]):
                weight = ONE
                for _, c in choice:
                    weight = weight * c
                assignment = {rep: d for rep, (d, _) in zip(reps, choice)}
                total = total + self.base.component(reps, assignment).scale(weight)
        return total


def vertex_renormalize(P: ProductSystem, Z: VertexMap) -> VertexRenormalizedSystem:
    return VertexRenormalizedSystem(P, Z)
