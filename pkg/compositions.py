#!/usr/bin/env python3
"""
有限标签集合上的组合（set compositions）

组合 F = (S1,...,Sk) 是把有限集 I 划分成有序、非空、两两不交的块（lump）。
本模块只处理纯组合学：拼接、限制、反序、细化序、枚举与 Tits 积。
所有值构造后不可变。
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import comb
from typing import Any, FrozenSet, Iterable, Iterator, List, Optional, Tuple, Union

from loguru import logger

from config import check_bound, get_settings
from errors import DisjointnessError, DomainError, IncomparableError, ParseError


@dataclass(frozen=True, order=True)
class FreshLabel:
    """保留命名空间中的新标签 ∗k，与任何用户标签都不冲突"""
    index: int

    def __str__(self) -> str:
        return f"*{self.index}"


Label = Union[int, str, FreshLabel]
FiniteSet = FrozenSet[Label]


def label_key(label: Label) -> Tuple[int, Any]:
    """标签的全序：整数 < 字符串 < 新标签"""
    if isinstance(label, bool):
        raise DomainError(f"布尔值不能作为标签: {label!r}")
    if isinstance(label, int):
        return (0, label)
    if isinstance(label, str):
        return (1, label)
    if isinstance(label, FreshLabel):
        return (2, label.index)
    raise DomainError(f"不支持的标签类型: {type(label).__name__}")


def sorted_labels(labels: Iterable[Label]) -> Tuple[Label, ...]:
    return tuple(sorted(labels, key=label_key))


def finite_set(labels: Iterable[Label] = ()) -> FiniteSet:
    """构造有限集，同时检查标签类型"""
    result = frozenset(labels)
    for label in result:
        label_key(label)
    return result


def format_label(label: Label) -> str:
    return str(label)


def format_set(labels: Iterable[Label]) -> str:
    parts = [format_label(l) for l in sorted_labels(labels)]
    if all(len(p) == 1 for p in parts):
        return "".join(parts)
    return " ".join(parts)


@dataclass(frozen=True)
class Composition:
    """有序块序列；块内部按标签全序排列"""
    lumps: Tuple[FiniteSet, ...]

    def __post_init__(self):
        lumps = tuple(finite_set(lump) for lump in self.lumps)
        seen = set()
        for lump in lumps:
            if not lump:
                raise DomainError("组合的块必须非空")
            if seen & lump:
                raise DisjointnessError(f"组合的块两两不交: {sorted_labels(seen & lump)}")
            seen |= lump
        object.__setattr__(self, "lumps", lumps)

    @property
    def ground(self) -> FiniteSet:
        return frozenset().union(*self.lumps)

    def __len__(self) -> int:
        return len(self.lumps)

    def __iter__(self) -> Iterator[FiniteSet]:
        return iter(self.lumps)

    def sort_key(self) -> Tuple:
        """按诱导满射（每个标签所在块的序号）的字典序"""
        where = {label: k for k, lump in enumerate(self.lumps) for label in lump}
        return tuple(where[label] for label in sorted_labels(where))

    def canonical(self) -> Tuple[Tuple[Label, ...], ...]:
        return tuple(sorted_labels(lump) for lump in self.lumps)

    def __str__(self) -> str:
        return "(" + ",".join(format_set(lump) for lump in self.lumps) + ")"


EMPTY = Composition(())


def composition(*lumps: Iterable[Label]) -> Composition:
    return Composition(tuple(frozenset(lump) for lump in lumps))


def sort_compositions(comps: Iterable[Composition]) -> List[Composition]:
    """规范顺序：先比较基础集合，再比较诱导满射"""
    return sorted(comps, key=lambda F: (tuple(label_key(l) for l in sorted_labels(F.ground)), F.sort_key()))


# =============================================================================
# 基本运算
# =============================================================================

def concat(F: Composition, G: Composition) -> Composition:
    """拼接 FG"""
    if F.ground & G.ground:
        raise DisjointnessError(f"拼接要求基础集合不交: {F} 与 {G}")
    return Composition(F.lumps + G.lumps)


def restrict(F: Composition, S: Iterable[Label]) -> Composition:
    """限制 F|_S，删除空块"""
    S = frozenset(S)
    if not S <= F.ground:
        raise DomainError(f"限制集合 {format_set(S)} 不是 {F} 基础集合的子集")
    return Composition(tuple(lump & S for lump in F.lumps if lump & S))


def opposite(F: Composition) -> Composition:
    return Composition(tuple(reversed(F.lumps)))


def _check_same_ground(F: Composition, G: Composition) -> None:
    if F.ground != G.ground:
        raise DomainError(f"基础集合不一致: {F} 与 {G}")


def coarsens(G: Composition, F: Composition) -> bool:
    """G ≤ F：G 的每个块都是 F 中若干相邻块按序的并"""
    _check_same_ground(G, F)
    k = 0
    for target in G.lumps:
        acc = frozenset()
        while acc != target:
            if k >= len(F.lumps) or not F.lumps[k] <= target:
                return False
            acc |= F.lumps[k]
            k += 1
    return k == len(F.lumps)


def is_refinement_of(F: Composition, G: Composition) -> bool:
    """F ≥ G"""
    return coarsens(G, F)


def deshuffle(F: Composition, S: Iterable[Label]) -> Optional[Composition]:
    """F↾S：若 S 是 F 若干块（不必相邻）的并则为 F|_S，否则为 None"""
    S = frozenset(S)
    for lump in F.lumps:
        if lump & S and not lump <= S:
            return None
    return restrict(F, S)


def two_lump_coarsenings(F: Composition) -> List[Composition]:
    """F 的全部两块粗化（在某个位置切成左右两段）"""
    result = []
    for m in range(1, len(F.lumps)):
        left = frozenset().union(*F.lumps[:m])
        right = frozenset().union(*F.lumps[m:])
        result.append(Composition((left, right)))
    return result


def length_ratio(F: Composition, G: Composition) -> int:
    """l(F/G) = Π_j l(F|_{T_j})，要求 G ≤ F"""
    if not coarsens(G, F):
        raise IncomparableError(f"{G} 不是 {F} 的粗化")
    result = 1
    for lump in G.lumps:
        result *= len(restrict(F, lump))
    return result


def factorial_ratio(F: Composition, G: Composition) -> int:
    """(F/G)! = Π_j l(F|_{T_j})!"""
    if not coarsens(G, F):
        raise IncomparableError(f"{G} 不是 {F} 的粗化")
    result = 1
    for lump in G.lumps:
        for m in range(2, len(restrict(F, lump)) + 1):
            result *= m
    return result


def tits_product(F: Composition, G: Composition) -> Composition:
    """F ▷ G：按 F 为主序，用 G 的块去切 F 的每个块"""
    _check_same_ground(F, G)
    lumps = []
    for S in F.lumps:
        for U in G.lumps:
            if S & U:
                lumps.append(S & U)
    return Composition(tuple(lumps))


# =============================================================================
# 枚举
# =============================================================================

def ordered_bell(n: int) -> int:
    """有序 Bell 数 a(n) = Σ_{k≥1} C(n,k) a(n-k)"""
    a = [1]
    for m in range(1, n + 1):
        a.append(sum(comb(m, k) * a[m - k] for k in range(1, m + 1)))
    return a[n]


def _surjections(n: int) -> Iterator[Tuple[int, ...]]:
    """按字典序生成 {0..n-1} 上满射到 {0..k-1} 的值序列"""
    word: List[int] = []

    def rec(used: FrozenSet[int], top: int) -> Iterator[Tuple[int, ...]]:
        pos = len(word)
        if pos == n:
            if len(used) == top + 1:
                yield tuple(word)
            return
        for v in range(n):
            new_top = max(top, v)
            new_used = used | {v}
            if (new_top + 1) - len(new_used) > n - pos - 1:
                continue
            word.append(v)
            yield from rec(new_used, new_top)
            word.pop()

    yield from rec(frozenset(), -1)


@lru_cache(maxsize=64)
def _compositions_of(labels: Tuple[Label, ...]) -> Tuple[Composition, ...]:
    n = len(labels)
    if n == 0:
        return (EMPTY,)
    result = []
    for word in _surjections(n):
        k = max(word) + 1
        lumps = [set() for _ in range(k)]
        for label, v in zip(labels, word):
            lumps[v].add(label)
        result.append(Composition(tuple(frozenset(l) for l in lumps)))
    logger.debug(f"枚举 |I|={n} 的组合，共 {len(result)} 个")
    return tuple(result)


def enumerate_compositions(I: Iterable[Label]) -> Iterator[Composition]:
    """Σ[I] 的全部组合，按诱导满射的字典序"""
    labels = sorted_labels(frozenset(I))
    check_bound(len(labels), get_settings().composition_bound, "|I|")
    return iter(_compositions_of(labels))


def enumerate_refinements(F: Composition) -> Iterator[Composition]:
    """全部 G ≥ F：对每个块独立地取其组合再拼接"""
    pieces = [_compositions_of(sorted_labels(lump)) for lump in F.lumps]
    for choice in product(*pieces):
        lumps: Tuple[FiniteSet, ...] = ()
        for part in choice:
            lumps += part.lumps
        yield Composition(lumps)


@lru_cache(maxsize=64)
def _two_lump(labels: Tuple[Label, ...]) -> Tuple[Composition, ...]:
    n = len(labels)
    whole = frozenset(labels)
    result = []
    for mask in range(1, (1 << n) - 1):
        S = frozenset(labels[i] for i in range(n) if mask >> i & 1)
        result.append(Composition((S, whole - S)))
    return tuple(sort_compositions(result))


def two_lump_compositions(I: Iterable[Label]) -> List[Composition]:
    """[I;2]：全部有序两块组合 (S,T)"""
    return list(_two_lump(sorted_labels(frozenset(I))))


# =============================================================================
# 文本与 JSON
# =============================================================================

def parse_label(token: str) -> Label:
    token = token.strip()
    if not token:
        raise ParseError("空标签")
    if token.startswith("*") or token.startswith("∗"):
        raise ParseError(f"标签 {token!r} 属于保留的新标签命名空间")
    if token.lstrip("-").isdigit():
        return int(token)
    return token


def parse_lump(text: str) -> FiniteSet:
    text = text.strip()
    if not text:
        raise ParseError("块不能为空")
    tokens = text.split() if any(ch.isspace() for ch in text) else list(text)
    labels = [parse_label(t) for t in tokens]
    if len(set(labels)) != len(labels):
        raise ParseError(f"块 {text!r} 中有重复标签")
    return frozenset(labels)


def parse_composition(text: str) -> Composition:
    """解析 (12,3) 记号；块内单字符标签可连写，否则用空格分隔"""
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise ParseError(f"组合记号须用括号包围: {text!r}")
    body = text[1:-1].strip()
    if not body:
        return EMPTY
    try:
        return Composition(tuple(parse_lump(part) for part in body.split(",")))
    except (DisjointnessError, DomainError) as e:
        raise ParseError(f"无法解析组合 {text!r}: {e}") from e


def label_to_json(label: Label) -> Any:
    if isinstance(label, FreshLabel):
        return str(label)
    return label


def label_from_json(obj: Any) -> Label:
    if isinstance(obj, str) and obj.startswith("*") and obj[1:].isdigit():
        return FreshLabel(int(obj[1:]))
    if isinstance(obj, bool) or not isinstance(obj, (int, str)):
        raise ParseError(f"不支持的标签: {obj!r}")
    return obj


def composition_to_json(F: Composition) -> List[List[Any]]:
    return [[label_to_json(l) for l in lump] for lump in F.canonical()]


def composition_from_json(obj: Any) -> Composition:
    if not isinstance(obj, list):
        raise ParseError("组合的 JSON 形式应为数组的数组")
    try:
        return Composition(tuple(frozenset(label_from_json(l) for l in lump) for lump in obj))
    except (DisjointnessError, DomainError, TypeError) as e:
        raise ParseError(f"组合 JSON 不合法: {e}") from e


def set_to_json(S: Iterable[Label]) -> List[Any]:
    return [label_to_json(l) for l in sorted_labels(S)]


def set_from_json(obj: Any) -> FiniteSet:
    if not isinstance(obj, list):
        raise ParseError("集合的 JSON 形式应为数组")
    return finite_set(label_from_json(l) for l in obj)
