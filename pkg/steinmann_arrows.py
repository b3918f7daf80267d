#!/usr/bin/env python3
"""
Steinmann 箭头

u_{a,b} 是 Σ 上交换的上双导子，每次添加一个新标签 ∗：
    u_{a,b}(H_(I)) = -a H_(∗,I) + (a+b) H_(∗I) - b H_(I,∗)
推迟箭头 ↓ = u_{1,0}，超前箭头 ↑ = u_{0,1}。迭代后得到推迟/超前元素
R_(Y;I)、A_(Y;I)，柯里化后得到 Σ → Σ^E 的代数同态。
"""

from dataclasses import dataclass
from enum import Enum
from itertools import combinations, permutations
from math import factorial
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from loguru import logger

from compositions import (
    Composition, FiniteSet, FreshLabel, Label, finite_set, format_set, sorted_labels,
)
from config import check_bound, get_settings
from errors import DisjointnessError, FreshLabelCollisionError, NotACellError, NotSymmetricError
from scalars import ONE, Scalar, ScalarLike, as_scalar, frac
from species_algebra import (
    SigElement, _add_into, antipode, apply_linear, mult, relabel, sig_to_json, unit,
)
from zie_cells import Cell, cell_of_point


class ArrowDirection(Enum):
    """箭头方向"""
    RETARDED = "retarded"    # 推迟 ↓
    ADVANCED = "advanced"    # 超前 ↑


def _direction(direction) -> ArrowDirection:
    return direction if isinstance(direction, ArrowDirection) else ArrowDirection(direction)


# =============================================================================
# 新标签
# =============================================================================

class FreshLabelPool:
    """按 ∗1, ∗2, ... 顺序发放新标签"""

    def __init__(self, start: int = 1):
        self._next = start

    def take(self, count: int = 1, avoid: Iterable[Label] = ()) -> Tuple[FreshLabel, ...]:
        avoid = frozenset(avoid)
        labels: List[FreshLabel] = []
        while len(labels) < count:
            label = FreshLabel(self._next)
            self._next += 1
            if label not in avoid:
                labels.append(label)
        return tuple(labels)

    def __next__(self) -> FreshLabel:
        return self.take(1)[0]

    def __iter__(self) -> Iterator[FreshLabel]:
        return self


def fresh_labels(count: int, offset: int = 0) -> Tuple[FreshLabel, ...]:
    """[r] = (∗(offset+1), ..., ∗(offset+r))"""
    return tuple(FreshLabel(offset + k) for k in range(1, count + 1))


def _check_fresh(ground: FiniteSet, labels: Iterable[Label]) -> None:
    clash = ground & frozenset(labels)
    if clash:
        raise FreshLabelCollisionError(f"新标签与基础集合冲突: {format_set(clash)}")


def one_lump(labels: Iterable[Label]) -> SigElement:
    """H_(X)；X 为空时为单位元"""
    labels = finite_set(labels)
    if not labels:
        return unit()
    return SigElement(labels, {Composition((labels,)): ONE})


# =============================================================================
# 上双导子与箭头
# =============================================================================

def _up_image(F: Composition, star: Label, a: Scalar, b: Scalar) -> Dict[Composition, Scalar]:
    s = frozenset([star])
    result: Dict[Composition, Scalar] = {}
    lumps = F.lumps
    for m, lump in enumerate(lumps):
        before, after = lumps[:m], lumps[m + 1:]
        _add_into(result, Composition(before + (s, lump) + after), -a)
        _add_into(result, Composition(before + (lump | s,) + after), a + b)
        _add_into(result, Composition(before + (lump, s) + after), -b)
    return result


def up_derivation(x: SigElement, star: Label, coeffs: Tuple[ScalarLike, ScalarLike]) -> SigElement:
    """u_{a,b}：按块求和的 Leibniz 延拓"""
    if star in x.ground:
        raise FreshLabelCollisionError(f"标签 {star} 已在基础集合 {{{format_set(x.ground)}}} 中")
    a, b = as_scalar(coeffs[0]), as_scalar(coeffs[1])
    return apply_linear(x, lambda F: _up_image(F, star, a, b), ground=x.ground | {star})


def retarded_arrow(x: SigElement, star: Label) -> SigElement:
    """∗↓ = u_{1,0}"""
    return up_derivation(x, star, (1, 0))


def advanced_arrow(x: SigElement, star: Label) -> SigElement:
    """∗↑ = u_{0,1}"""
    return up_derivation(x, star, (0, 1))


def arrow(x: SigElement, star: Label, direction=ArrowDirection.RETARDED) -> SigElement:
    if _direction(direction) is ArrowDirection.RETARDED:
        return retarded_arrow(x, star)
    return advanced_arrow(x, star)


def iterated_arrow(x: SigElement, Y: Iterable[Label], direction=ArrowDirection.RETARDED,
                   order: Optional[Sequence[Label]] = None) -> SigElement:
    """Y↓x = y_r↓ ∘ ... ∘ y_1↓；默认按标签规范顺序依次作用"""
    Y = finite_set(Y)
    _check_fresh(x.ground, Y)
    sequence = sorted_labels(Y) if order is None else tuple(order)
    if frozenset(sequence) != Y or len(sequence) != len(Y):
        raise DisjointnessError("作用顺序必须恰好是 Y 的一个排列")
    result = x
    for y in sequence:
        result = arrow(result, y, direction)
    return result


def retarded_arrow_many(x: SigElement, Y: Iterable[Label]) -> SigElement:
    return iterated_arrow(x, Y, ArrowDirection.RETARDED)


def retarded_element(Y: Iterable[Label], I: Iterable[Label]) -> SigElement:
    """R_(Y;I) = Σ_{Y1⊔Y2=Y} H̄_(Y1) H_(Y2⊔I)"""
    Y, I = finite_set(Y), finite_set(I)
    _check_fresh(I, Y)
    total = SigElement(Y | I, {})
    for Y1, Y2 in _splits(Y):
        total = total + mult(antipode(one_lump(Y1)), one_lump(Y2 | I))
    return total


def advanced_element(Y: Iterable[Label], I: Iterable[Label]) -> SigElement:
    """A_(Y;I) = Σ_{Y1⊔Y2=Y} H_(Y1⊔I) H̄_(Y2)"""
    Y, I = finite_set(Y), finite_set(I)
    _check_fresh(I, Y)
    total = SigElement(Y | I, {})
    for Y1, Y2 in _splits(Y):
        total = total + mult(one_lump(Y1 | I), antipode(one_lump(Y2)))
    return total


def _splits(Y: FiniteSet) -> Iterator[Tuple[FiniteSet, FiniteSet]]:
    labels = sorted_labels(Y)
    for r in range(len(labels) + 1):
        for chosen in combinations(labels, r):
            Y1 = frozenset(chosen)
            yield Y1, Y - Y1


# =============================================================================
# 胞腔上的箭头
# =============================================================================

def cell_arrow_channels(cell: Cell, Y: Iterable[Label], direction=ArrowDirection.RETARDED) -> frozenset:
    """Y↓S = {(Y1⊔S, Y2⊔T) : (S,T)∈S 或 S=I}；Y↑S 中以 S=∅ 代替 S=I"""
    Y = finite_set(Y)
    I = cell.ground
    _check_fresh(I, Y)
    retarded = _direction(direction) is ArrowDirection.RETARDED
    chosen = set()
    for Y1, Y2 in _splits(Y):
        for ch in cell.channels:
            S, T = ch.lumps
            chosen.add(Composition((Y1 | S, Y2 | T)))
        if retarded and Y2:
            chosen.add(Composition((Y1 | I, Y2)))
        if not retarded and Y1:
            chosen.add(Composition((Y1, Y2 | I)))
    return frozenset(chosen)


def cell_arrow(cell: Cell, Y: Iterable[Label], direction=ArrowDirection.RETARDED) -> Cell:
    """沿 λ_{Y,I} 方向小量平移 S 的见证点，得到 Y⊔I 上的胞腔"""
    Y = finite_set(Y)
    expected = cell_arrow_channels(cell, Y, direction)
    if not Y:
        return cell
    n, r = len(cell.ground), len(Y)
    K = n * r + 1
    sign = 1 if _direction(direction) is ArrowDirection.RETARDED else -1
    x = cell.point()
    point = {l: K * n * x[l] + sign * r for l in cell.ground}
    point.update({y: -sign * n for y in Y})
    result = cell_of_point(cell.ground | Y, point)
    if result.channels != expected:
        raise NotACellError(f"箭头作用后的通道集合与见证点不符: {cell}")
    return result


def cell_arrow_down(cell: Cell, star: Label) -> Cell:
    """∗↓S = {(∗S,T),(S,∗T),(I,∗)}"""
    return cell_arrow(cell, [star], ArrowDirection.RETARDED)


def cell_arrow_up(cell: Cell, star: Label) -> Cell:
    """∗↑S = {(∗S,T),(S,∗T),(∗,I)}"""
    return cell_arrow(cell, [star], ArrowDirection.ADVANCED)


# =============================================================================
# 柯里化：Σ → Σ^E
# =============================================================================

def _shift_fresh(x: SigElement, targets: Sequence[Label]) -> SigElement:
    """把 ∗1..∗r 依次换成 targets，其他标签不动"""
    sigma = {l: l for l in x.ground}
    for k, target in enumerate(targets, start=1):
        sigma[FreshLabel(k)] = target
    return relabel(x, sigma)


def symmetrize(x: SigElement, r: int) -> SigElement:
    """对 ∗1..∗r 的全部置换取平均"""
    if r <= 1:
        return x
    stars = fresh_labels(r)
    total = SigElement(x.ground, {})
    for perm in permutations(stars):
        total = total + _shift_fresh(x, perm)
    return total.scale(frac(1, factorial(r)))


@dataclass(frozen=True)
class TruncatedSeriesOfSig:
    """Σ^E[I] 中截断到 R_max 阶的元素；第 r 个分量在 [r]⊔I 上且关于 [r] 对称"""
    ground: FiniteSet
    r_max: int
    components: Tuple[SigElement, ...]

    __hash__ = None

    def __post_init__(self):
        if len(self.components) != self.r_max + 1:
            raise NotSymmetricError(f"分量个数应为 R_max+1 = {self.r_max + 1}")
        for r, c in enumerate(self.components):
            if c.ground != self.ground | frozenset(fresh_labels(r)):
                raise NotSymmetricError(f"第 {r} 个分量的基础集合应为 [{r}]⊔I")

    @classmethod
    def build(cls, ground: Iterable[Label], components: Sequence[SigElement], strict: bool = True) -> "TruncatedSeriesOfSig":
        """对分量做对称化；strict 时要求输入本身已对称"""
        ground = finite_set(ground)
        result = []
        for r, c in enumerate(components):
            sym = symmetrize(c, r)
            if strict and sym != c:
                raise NotSymmetricError(f"第 {r} 个分量在新标签置换下不对称")
            result.append(sym)
        return cls(ground, len(result) - 1, tuple(result))

    def component(self, r: int) -> SigElement:
        return self.components[r]

    def to_json(self) -> Dict:
        return {"R_max": self.r_max, "components": [sig_to_json(c) for c in self.components]}


def curried_arrow_series(x: SigElement, r_max: int, direction=ArrowDirection.RETARDED) -> TruncatedSeriesOfSig:
    """H_F ↦ Σ_r [r]↓H_F"""
    check_bound(r_max, get_settings().series_bound, "R_max")
    if any(isinstance(l, FreshLabel) for l in x.ground):
        raise FreshLabelCollisionError("柯里化要求基础集合中没有保留的新标签")
    components = [iterated_arrow(x, fresh_labels(r), direction) for r in range(r_max + 1)]
    logger.debug(f"柯里化级数完成，R_max={r_max}")
    return TruncatedSeriesOfSig.build(x.ground, components)


def series_product(x: TruncatedSeriesOfSig, y: TruncatedSeriesOfSig) -> TruncatedSeriesOfSig:
    """Σ^E 的乘法：(xy)_r = Σ_{r1+r2=r} r!/(r1!r2!) μ(x_{r1} ⊗ y_{r2})，按子集展开即对称化后的二项加权和"""
    if x.ground & y.ground:
        raise DisjointnessError(f"级数乘法要求基础集合不交: {format_set(x.ground & y.ground)}")
    r_max = min(x.r_max, y.r_max)
    components = []
    for r in range(r_max + 1):
        stars = fresh_labels(r)
        total = SigElement(x.ground | y.ground | frozenset(stars), {})
        for r1 in range(r + 1):
            for chosen in combinations(stars, r1):
                rest = tuple(s for s in stars if s not in chosen)
                left = _shift_fresh(x.components[r1], chosen)
                right = _shift_fresh(y.components[r - r1], rest)
                total = total + mult(left, right)
        components.append(total)
    return TruncatedSeriesOfSig(x.ground | y.ground, r_max, tuple(components))
