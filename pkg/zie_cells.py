#!/usr/bin/env python3
"""
本原李代数 Zie：树、胞腔与 Dynkin 元素

- 树 T 通过去括号得到组合，Q_T 是对所有分支交换的符号和
- 胞腔是对每对通道 {(S,T),(T,S)} 选定一个方向，并可由伴随辫排列的
  一个开胞室实现；每个胞腔都携带一个整数见证点
- Dynkin 元素 D_S、Steinmann 四项关系、秩计算与 Ruelle 恒等式
"""

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import factorial, lcm
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from loguru import logger
from sympy import Add, Eq, Rational, Symbol, symbols
from sympy import QQ, QQ_I
from sympy.functions.combinatorial.numbers import stirling
from sympy.polys.matrices import DomainMatrix
from sympy.solvers.simplex import InfeasibleLPError, UnboundedLPError, lpmax

from compositions import (
    Composition, FiniteSet, Label, _compositions_of, concat, finite_set, format_set, opposite,
    parse_lump, set_from_json, set_to_json, sort_compositions, sorted_labels,
    two_lump_coarsenings, two_lump_compositions,
)
from config import check_bound, get_settings
from errors import (
    DisjointnessError, DomainError, GenericityError, NonGenericPointError,
    NotACellError, NotPrimitiveError, ParseError,
)
from scalars import ONE
from species_algebra import SigElement, commutator, is_primitive, q_to_h

Channel = Composition


# =============================================================================
# 树
# =============================================================================

@dataclass(frozen=True)
class Leaf:
    block: FiniteSet

    def __post_init__(self):
        block = finite_set(self.block)
        if not block:
            raise DomainError("树叶的块必须非空")
        object.__setattr__(self, "block", block)

    def __str__(self) -> str:
        return format_set(self.block)


@dataclass(frozen=True)
class Node:
    left: "Tree"
    right: "Tree"

    def __post_init__(self):
        overlap = tree_ground(self.left) & tree_ground(self.right)
        if overlap:
            raise DisjointnessError(f"树叶的块两两不交: 公共标签 {format_set(overlap)}")

    def __str__(self) -> str:
        return f"[{self.left},{self.right}]"


Tree = Union[Leaf, Node]


def tree_ground(tree: Tree) -> FiniteSet:
    if isinstance(tree, Leaf):
        return tree.block
    return tree_ground(tree.left) | tree_ground(tree.right)


def debracket(tree: Tree) -> Composition:
    """F_T：从左到右读出叶子的块"""
    if isinstance(tree, Leaf):
        return Composition((tree.block,))
    return concat(debracket(tree.left), debracket(tree.right))


def parse_tree(text: str) -> Tree:
    """解析 [[24,[1,9]],678] 记号；单个元素的方括号表示一片叶子"""
    pos = 0

    def item() -> Tree:
        nonlocal pos
        if pos < len(text) and text[pos] == "[":
            pos += 1
            first = item()
            if pos < len(text) and text[pos] == ",":
                pos += 1
                second = item()
                node = Node(first, second)
            else:
                node = first
            if pos >= len(text) or text[pos] != "]":
                raise ParseError(f"树记号在位置 {pos} 缺少 ']': {text!r}")
            pos += 1
            return node
        start = pos
        while pos < len(text) and text[pos] not in ",[]":
            pos += 1
        return Leaf(parse_lump(text[start:pos]))

    text = text.strip()
    try:
        tree = item()
    except (DomainError, DisjointnessError) as e:
        raise ParseError(f"无法解析树 {text!r}: {e}") from e
    if pos != len(text):
        raise ParseError(f"树记号末尾有多余字符: {text[pos:]!r}")
    return tree


def _antisymmetrizations(tree: Tree) -> List[Tuple[Composition, int]]:
    if isinstance(tree, Leaf):
        return [(Composition((tree.block,)), 1)]
    result = []
    for L, s in _antisymmetrizations(tree.left):
        for R, t in _antisymmetrizations(tree.right):
            result.append((concat(L, R), s * t))
            result.append((concat(R, L), -s * t))
    return result


# =============================================================================
# Zie 元素
# =============================================================================

@dataclass(frozen=True)
class ZieElement:
    """经过本原性认证的 Σ 元素"""
    element: SigElement

    __hash__ = None

    def __post_init__(self):
        if not is_primitive(self.element):
            raise NotPrimitiveError(f"元素不是本原元: {self.element}")

    @property
    def ground(self) -> FiniteSet:
        return self.element.ground

    def __str__(self) -> str:
        return str(self.element)


def tree_to_Q(tree: Tree) -> ZieElement:
    """Q_T = Σ_{T'} (-1)^{(T,T')} Q_{F_{T'}}，再换到 H 基"""
    total = SigElement(tree_ground(tree), {})
    for F, sign in _antisymmetrizations(tree):
        total = total + q_to_h(F).scale(sign)
    return ZieElement(total)


def lie_bracket(a: ZieElement, b: ZieElement) -> ZieElement:
    """Zie 的李括号，在 Σ 中实现为交换子"""
    return ZieElement(commutator(a.element, b.element))


def tree_bracket(left: Tree, right: Tree) -> Tree:
    """两棵树拼成 [left,right]，基础集合须不交"""
    return Node(left, right)


# =============================================================================
# 通道与胞腔
# =============================================================================

def channel(S: Iterable[Label], T: Iterable[Label]) -> Channel:
    S, T = frozenset(S), frozenset(T)
    if not S or not T:
        raise DomainError("通道的两侧必须非空")
    return Composition((S, T))


def opposite_channel(ch: Channel) -> Channel:
    return opposite(ch)


@lru_cache(maxsize=64)
def _channel_pairs(labels: Tuple[Label, ...]) -> Tuple[Channel, ...]:
    if len(labels) < 2:
        return ()
    return tuple(ch for ch in two_lump_compositions(labels) if labels[0] in ch.lumps[0])


def channel_pairs(ground: Iterable[Label]) -> List[Channel]:
    """每对 {(S,T),(T,S)} 取一个代表：最小标签在 S 中"""
    return list(_channel_pairs(sorted_labels(ground)))


def channel_normal(ch: Channel, ground: Iterable[Label]) -> Tuple[int, ...]:
    """λ_ST 的整数代表：S 上为 |T|，T 上为 -|S|（和为零）"""
    S, T = ch.lumps
    return tuple(len(T) if l in S else -len(S) for l in sorted_labels(ground))


def _integer_point(values: Sequence[Fraction]) -> Tuple[int, ...]:
    den = 1
    for v in values:
        den = lcm(den, Fraction(v).denominator)
    return tuple(int(Fraction(v) * den) for v in values)


def _channel_sum(point: Mapping[Label, Fraction], S: FiniteSet):
    return sum((point[l] for l in S), 0)


@dataclass(frozen=True)
class Cell:
    """伴随辫排列的胞室：选定的通道集合及一个整数见证点"""
    ground: FiniteSet
    channels: FrozenSet[Channel]
    witness: Tuple[int, ...] = field(compare=False, hash=False, repr=False)

    def __post_init__(self):
        ground = finite_set(self.ground)
        channels = frozenset(self.channels)
        object.__setattr__(self, "ground", ground)
        object.__setattr__(self, "channels", channels)
        labels = sorted_labels(ground)
        if len(self.witness) != len(labels) or sum(self.witness) != 0:
            raise NotACellError("见证点的维数不符或坐标和不为零")
        for ch in channels:
            if len(ch) != 2 or ch.ground != ground:
                raise NotACellError(f"{ch} 不是 {{{format_set(ground)}}} 上的通道")
            if opposite(ch) in channels:
                raise NotACellError(f"通道 {ch} 与其反向同时被选中")
        if len(channels) != len(channel_pairs(ground)):
            raise NotACellError("每对通道必须恰好选定一个方向")
        point = dict(zip(labels, self.witness))
        for ch in channels:
            if _channel_sum(point, ch.lumps[0]) <= 0:
                raise NotACellError(f"见证点与通道 {ch} 的方向不符")

    def __contains__(self, ch: Channel) -> bool:
        return ch in self.channels

    def __len__(self) -> int:
        return len(self.channels)

    def point(self) -> Dict[Label, int]:
        return dict(zip(sorted_labels(self.ground), self.witness))

    def sorted_channels(self) -> List[Channel]:
        return sort_compositions(self.channels)

    def sort_key(self) -> Tuple:
        return tuple(sorted(ch.sort_key() for ch in self.channels))

    def flip(self, ch: Channel) -> FrozenSet[Channel]:
        """把 ch 换成反向后的通道集合（未必是胞腔）"""
        if ch not in self.channels:
            raise DomainError(f"{ch} 不在胞腔中")
        return (self.channels - {ch}) | {opposite(ch)}

    def __str__(self) -> str:
        return "{" + ",".join(str(ch) for ch in self.sorted_channels()) + "}"


def channel_sums(ground: Iterable[Label], x: Mapping[Label, Fraction]) -> Dict[Channel, Fraction]:
    return {ch: _channel_sum(x, ch.lumps[0]) for ch in two_lump_compositions(ground)}


def cell_of_point(ground: Iterable[Label], x: Union[Mapping[Label, object], Sequence[object]]) -> Cell:
    """一般位置的零和点所在的胞腔：Σ_{i∈S} x_i > 0 时选 (S,T)"""
    ground = finite_set(ground)
    labels = sorted_labels(ground)
    if isinstance(x, Mapping):
        if frozenset(x) != ground:
            raise DomainError("点的坐标必须与基础集合一一对应")
        values = [Fraction(x[l]) for l in labels]
    else:
        if len(x) != len(labels):
            raise DomainError("点的维数与基础集合不符")
        values = [Fraction(v) for v in x]
    if sum(values) != 0:
        raise DomainError("点必须位于零和子空间中")
    point = dict(zip(labels, values))
    chosen = set()
    for ch in channel_pairs(ground):
        s = _channel_sum(point, ch.lumps[0])
        if s == 0:
            raise NonGenericPointError(f"点落在通道 {ch} 的超平面上")
        chosen.add(ch if s > 0 else opposite(ch))
    return Cell(ground, frozenset(chosen), _integer_point(values))


def projected_basis_point(ground: Iterable[Label], i: Label) -> Dict[Label, int]:
    """e_i 在零和子空间上的投影（放大 n 倍后取整）"""
    ground = finite_set(ground)
    if i not in ground:
        raise DomainError(f"标签 {i} 不在基础集合中")
    n = len(ground)
    return {l: (n - 1 if l == i else -1) for l in ground}


def random_generic_point(ground: Iterable[Label], rng: random.Random) -> Dict[Label, int]:
    """随机一般位置整数点，有限次重试"""
    ground = finite_set(ground)
    labels = sorted_labels(ground)
    n = len(labels)
    retries = get_settings().witness_retries
    for attempt in range(retries):
        raw = rng.sample(range(-10 ** 6, 10 ** 6), n)
        total = sum(raw)
        point = {l: n * v - total for l, v in zip(labels, raw)}
        if all(_channel_sum(point, ch.lumps[0]) != 0 for ch in channel_pairs(ground)):
            return point
        logger.warning(f"随机点不在一般位置，重试 ({attempt + 1}/{retries})")
    raise GenericityError(f"{retries} 次重试后仍未找到一般位置的点")


def _is_union_closed(ground: FiniteSet, positives: Sequence[FiniteSet], chosen: FrozenSet[FiniteSet]) -> bool:
    """正集合的不交并（非全集时）必须仍为正"""
    for A, B in combinations(positives, 2):
        if not A & B and (A | B == ground or A | B not in chosen):
            return False
    return True


def find_witness(ground: Iterable[Label], channels: Iterable[Channel]) -> Optional[Tuple[int, ...]]:
    """精确有理线性规划：max t, Σ_S x ≥ t, Σ x = 0, t ≤ 1；t > 0 时可实现"""
    ground = finite_set(ground)
    labels = sorted_labels(ground)
    n = len(labels)
    channels = list(channels)
    if n <= 1:
        return (0,) * n
    xs = symbols(f"x0:{n}")
    t = Symbol("t")
    index = {l: k for k, l in enumerate(labels)}
    constraints = [Eq(Add(*xs), 0), t <= 1]
    for ch in channels:
        constraints.append(Add(*[xs[index[l]] for l in ch.lumps[0]]) - t >= 0)
    try:
        optimum, solution = lpmax(t, constraints)
    except (InfeasibleLPError, UnboundedLPError) as e:
        logger.debug(f"线性规划无解: {e}")
        return None
    if Rational(optimum) <= 0:
        return None
    values = []
    for x in xs:
        v = Rational(solution.get(x, 0))
        values.append(Fraction(int(v.p), int(v.q)))
    return _integer_point(values)


def make_cell(ground: Iterable[Label], channels: Iterable[Channel]) -> Cell:
    """由通道集合构造胞腔，见证点用线性规划求得"""
    ground = finite_set(ground)
    channels = frozenset(channels)
    witness = find_witness(ground, channels)
    if witness is None:
        raise NotACellError(f"通道集合不可实现为胞室: {{{','.join(str(c) for c in sort_compositions(channels))}}}")
    return Cell(ground, channels, witness)


def _cross_wall(cell: Cell, flip: Channel) -> Optional[Tuple[int, ...]]:
    """沿 λ 方向穿过 flip 的超平面；若它是最先被穿过的墙则直接得到邻接胞腔的见证点"""
    labels = sorted_labels(cell.ground)
    n = len(labels)
    S = flip.lumps[0]
    d = {l: (len(S) - n if l in S else len(S)) for l in labels}
    x = cell.point()
    crossings = []
    for ch in cell.channels:
        A = ch.lumps[0]
        rate = sum(d[l] for l in A)
        if rate < 0:
            crossings.append((Fraction(_channel_sum(x, A), -rate), ch))
    crossings.sort(key=lambda item: item[0])
    if not crossings or crossings[0][1] != flip:
        return None
    if len(crossings) > 1:
        if crossings[1][0] == crossings[0][0]:
            return None
        t = (crossings[0][0] + crossings[1][0]) / 2
    else:
        t = crossings[0][0] + 1
    return _integer_point([x[l] + t * d[l] for l in labels])


def _neighbour(cell: Cell, flip: Channel, rejected: set) -> Optional[Cell]:
    target = cell.flip(flip)
    if target in rejected:
        return None
    witness = _cross_wall(cell, flip)
    if witness is None:
        positives = [ch.lumps[0] for ch in target]
        if not _is_union_closed(cell.ground, positives, frozenset(positives)):
            rejected.add(target)
            return None
        witness = find_witness(cell.ground, target)
    if witness is None:
        rejected.add(target)
        return None
    return Cell(cell.ground, target, witness)


@lru_cache(maxsize=32)
def _cells_of(labels: Tuple[Label, ...], seed: int) -> Tuple[Cell, ...]:
    ground = frozenset(labels)
    if len(labels) <= 1:
        return (Cell(ground, frozenset(), (0,) * len(labels)),)
    rng = random.Random(seed)
    start = cell_of_point(ground, random_generic_point(ground, rng))
    found: Dict[FrozenSet[Channel], Cell] = {start.channels: start}
    rejected: set = set()
    queue = deque([start])
    while queue:
        cell = queue.popleft()
        for ch in cell.sorted_channels():
            target = cell.flip(ch)
            if target in found:
                continue
            nb = _neighbour(cell, ch, rejected)
            if nb is not None:
                found[target] = nb
                queue.append(nb)
    logger.debug(f"|I|={len(labels)} 的胞腔枚举完成: {len(found)} 个")
    return tuple(sorted(found.values(), key=Cell.sort_key))


def enumerate_cells(I: Iterable[Label], seed: Optional[int] = None) -> Iterator[Cell]:
    """沿胞室邻接图做广度搜索，枚举全部胞腔（每个都带见证点）"""
    labels = sorted_labels(frozenset(I))
    if not labels:
        raise DomainError("胞腔枚举要求基础集合非空")
    check_bound(len(labels), get_settings().cell_bound, "|I|")
    return iter(_cells_of(labels, get_settings().seed if seed is None else seed))


def brute_force_cells(I: Iterable[Label]) -> List[Cell]:
    """穷举全部符号向量并逐一做可行性检验（仅用于 |I| ≤ 4 的交叉验证）"""
    labels = sorted_labels(frozenset(I))
    check_bound(len(labels), 4, "|I|（穷举符号向量）")
    ground = frozenset(labels)
    pairs = channel_pairs(ground)
    cells = []
    for signs in product((True, False), repeat=len(pairs)):
        chosen = frozenset(ch if s else opposite(ch) for ch, s in zip(pairs, signs))
        witness = find_witness(ground, chosen)
        if witness is not None:
            cells.append(Cell(ground, chosen, witness))
    return sorted(cells, key=Cell.sort_key)


def retarded_cell(ground: Iterable[Label], i: Label) -> Cell:
    """S_i = {(S,T): i ∈ S}"""
    return cell_of_point(ground, projected_basis_point(ground, i))


def advanced_cell(ground: Iterable[Label], i: Label) -> Cell:
    """S̄_i = {(S,T): i ∈ T}"""
    return cell_of_point(ground, {l: -v for l, v in projected_basis_point(ground, i).items()})


# =============================================================================
# Dynkin 元素
# =============================================================================

@lru_cache(maxsize=16)
def _coarsening_table(labels: Tuple[Label, ...]) -> Tuple[Tuple[Composition, FrozenSet[Channel]], ...]:
    return tuple((F, frozenset(two_lump_coarsenings(opposite(F)))) for F in _compositions_of(labels))


@lru_cache(maxsize=4096)
def _dynkin(cell: Cell) -> SigElement:
    labels = sorted_labels(cell.ground)
    terms = {}
    for F, family in _coarsening_table(labels):
        if family <= cell.channels:
            terms[F] = ONE if len(F) % 2 == 1 else -ONE
    return SigElement(cell.ground, terms)


def dynkin_element(cell: Cell) -> ZieElement:
    """D_S = -Σ_{F̄ ⊆ S} (-1)^{l(F)} H_F"""
    check_bound(len(cell.ground), get_settings().composition_bound, "|I|")
    return ZieElement(_dynkin(cell))


def total_retarded(i: Label, I: Iterable[Label]) -> ZieElement:
    """全推迟 Dynkin 元素 D_i"""
    I = finite_set(I)
    if i not in I:
        raise DomainError(f"标签 {i} 不在 {{{format_set(I)}}} 中")
    return dynkin_element(retarded_cell(I, i))


def total_advanced(i: Label, I: Iterable[Label]) -> ZieElement:
    """全超前 Dynkin 元素 D_ī"""
    I = finite_set(I)
    if i not in I:
        raise DomainError(f"标签 {i} 不在 {{{format_set(I)}}} 中")
    return dynkin_element(advanced_cell(I, i))


# =============================================================================
# Steinmann 关系与秩
# =============================================================================

def overlapping(c1: Channel, c2: Channel) -> bool:
    """交叉通道：S∩U、S∩V、T∩U、T∩V 都非空"""
    S, T = c1.lumps
    U, V = c2.lumps
    return bool(S & U and S & V and T & U and T & V)


def steinmann_quadruples(I: Iterable[Label], seed: Optional[int] = None) -> Iterator[Tuple[Cell, Cell, Cell, Cell]]:
    """(S1,S2,S3,S4)：S2 反转 (S,T)，S3 反转两者，S4 反转 (U,V)；四者均为胞腔"""
    cells = list(enumerate_cells(I, seed))
    by_channels = {cell.channels: cell for cell in cells}
    seen = set()
    for cell in cells:
        chosen = cell.sorted_channels()
        for c1, c2 in combinations(chosen, 2):
            if not overlapping(c1, c2):
                continue
            s2 = by_channels.get(cell.flip(c1))
            s4 = by_channels.get(cell.flip(c2))
            s3 = by_channels.get((cell.channels - {c1, c2}) | {opposite(c1), opposite(c2)})
            if s2 is None or s3 is None or s4 is None:
                continue
            key = frozenset(c.channels for c in (cell, s2, s3, s4))
            if key in seen:
                continue
            seen.add(key)
            yield (cell, s2, s3, s4)


def steinmann_sum(quadruple: Tuple[Cell, Cell, Cell, Cell]) -> SigElement:
    """D1 - D2 + D3 - D4"""
    d1, d2, d3, d4 = (dynkin_element(c).element for c in quadruple)
    return d1 - d2 + d3 - d4


def _rank(rows: List[Dict[int, object]], ncols: int) -> int:
    if not rows:
        return 0
    values = [v for row in rows for v in row.values()]
    real = all(not getattr(v, "y", 0) for v in values)
    domain = QQ if real else QQ_I
    data = {}
    for r, row in enumerate(rows):
        if row:
            data[r] = {c: (v.x if real and hasattr(v, "x") else domain.convert(v)) for c, v in row.items()}
    return DomainMatrix(data, (len(rows), ncols), domain).rank()


def element_rank(elements: Sequence[SigElement]) -> int:
    """一组元素在 H 基下的精确秩"""
    index: Dict[Composition, int] = {}
    rows = []
    for a in elements:
        row = {}
        for F, c in a.terms.items():
            row[index.setdefault(F, len(index))] = c
        rows.append(row)
    return _rank(rows, max(len(index), 1))


def dynkin_rank(I: Iterable[Label], seed: Optional[int] = None) -> int:
    """全部 Dynkin 元素张成空间的维数"""
    return element_rank([dynkin_element(c).element for c in enumerate_cells(I, seed)])


def zie_dimension(n: int) -> int:
    """dim Zie[n] = Σ_k S(n,k)(k-1)!"""
    if n <= 0:
        return 0
    return sum(int(stirling(n, k)) * factorial(k - 1) for k in range(1, n + 1))


def steinmann_relation_quotient_dimension(I: Iterable[Label], seed: Optional[int] = None) -> int:
    """胞腔形式张成空间对 Steinmann 关系的商的维数"""
    cells = list(enumerate_cells(I, seed))
    index = {c.channels: k for k, c in enumerate(cells)}
    rows = []
    for quad in steinmann_quadruples(I, seed):
        row = {}
        for cell, sign in zip(quad, (1, -1, 1, -1)):
            k = index[cell.channels]
            row[k] = row.get(k, 0) + sign
        rows.append({k: QQ(v) for k, v in row.items() if v})
    return len(cells) - _rank(rows, len(cells))


# =============================================================================
# 胞腔补全与 Ruelle 恒等式
# =============================================================================

def _trivial_or_chosen(part: FiniteSet, whole: FiniteSet, cell: Cell) -> Optional[bool]:
    """None 表示限制平凡；否则返回限制是否被选中"""
    if not part or part == whole:
        return None
    return Composition((part, whole - part)) in cell.channels


def disjoint_union_channels(S1: Cell, S2: Cell) -> List[Channel]:
    """S1 ⊔ S2：I 上对 S、T 的限制平凡或被选中、且至少一侧非平凡的通道"""
    S, T = S1.ground, S2.ground
    result = []
    for ch in two_lump_compositions(S | T):
        A = ch.lumps[0]
        left = _trivial_or_chosen(A & S, S, S1)
        right = _trivial_or_chosen(A & T, T, S2)
        if left is False or right is False or (left is None and right is None):
            continue
        result.append(ch)
    return sort_compositions(result)


def cell_completion(S1: Cell, S2: Cell, ch: Channel, seed: Optional[int] = None) -> Cell:
    """包含 S1⊔S2 且选定 ch 的胞腔：K·(αx1 ⊕ βx2) ± λ_ST"""
    S, T = S1.ground, S2.ground
    if S & T:
        raise DisjointnessError(f"胞腔补全要求基础集合不交: {format_set(S & T)}")
    if not S or not T:
        raise DomainError("胞腔补全要求两侧基础集合非空")
    if ch.lumps == (S, T):
        sign = 1
    elif ch.lumps == (T, S):
        sign = -1
    else:
        raise DomainError(f"{ch} 不是 ({format_set(S)},{format_set(T)}) 或其反向")
    ground = S | T
    labels = sorted_labels(ground)
    lam = dict(zip(labels, channel_normal(Composition((S, T)), ground)))
    K = len(S) * len(T) + 1
    x1, x2 = S1.point(), S2.point()
    required = disjoint_union_channels(S1, S2)
    rng = random.Random(get_settings().seed if seed is None else seed)
    retries = get_settings().witness_retries
    for attempt in range(retries):
        alpha, beta = rng.randint(1, 97), rng.randint(1, 97)
        base = {l: alpha * x1[l] if l in S else beta * x2[l] for l in labels}
        point = {l: K * base[l] + sign * lam[l] for l in labels}
        try:
            cell = cell_of_point(ground, point)
        except NonGenericPointError:
            logger.warning(f"补全见证点不在一般位置，重试 ({attempt + 1}/{retries})")
            continue
        if ch in cell and all(c in cell for c in required):
            return cell
        logger.warning(f"补全胞腔未包含 S1⊔S2，重试 ({attempt + 1}/{retries})")
    raise GenericityError(f"{retries} 次重试后仍未得到胞腔补全")


def verify_ruelle(S1: Cell, S2: Cell, seed: Optional[int] = None) -> bool:
    """[D_{S1}, D_{S2}] = D_{S^{[S,T]}} - D_{S^{[T,S]}}"""
    S, T = S1.ground, S2.ground
    forward = cell_completion(S1, S2, Composition((S, T)), seed)
    backward_channels = forward.flip(Composition((S, T)))
    backward = cell_completion(S1, S2, Composition((T, S)), seed)
    if backward.channels != backward_channels:
        backward = make_cell(S | T, backward_channels)
    lhs = commutator(dynkin_element(S1).element, dynkin_element(S2).element)
    rhs = dynkin_element(forward).element - dynkin_element(backward).element
    return lhs == rhs


# =============================================================================
# JSON
# =============================================================================

def cell_to_json(cell: Cell) -> Dict:
    return {
        "ground": set_to_json(cell.ground),
        "channels": [[set_to_json(ch.lumps[0]), set_to_json(ch.lumps[1])] for ch in cell.sorted_channels()],
    }


def cell_from_json(obj: Mapping) -> Cell:
    """载入后重新求见证点并验证"""
    try:
        ground = set_from_json(obj["ground"])
        channels = [channel(set_from_json(S), set_from_json(T)) for S, T in obj["channels"]]
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"胞腔 JSON 不合法: {e}") from e
    return make_cell(ground, channels)
