#!/usr/bin/env python3
"""
异常类型定义

所有前置条件失败都抛出 CausalSpeciesError 的子类（同时也是 ValueError），
错误信息说明被违反的前置条件。
"""


class CausalSpeciesError(ValueError):
    """库内所有错误的基类"""


class DisjointnessError(CausalSpeciesError):
    """两个标签集合本应不相交却有重叠"""


class DomainError(CausalSpeciesError):
    """子集、基础集合或标签不满足定义域要求"""


class IncomparableError(CausalSpeciesError):
    """两个组合在细化序下不可比较"""


class BoundExceededError(CausalSpeciesError):
    """超出配置的基数或截断上界"""


class NonGenericPointError(CausalSpeciesError):
    """点落在某个通道超平面上"""


class GenericityError(CausalSpeciesError):
    """有限次重试后仍未找到一般位置的见证点"""


class NotPrimitiveError(CausalSpeciesError):
    """元素不是本原元"""


class NotACellError(CausalSpeciesError):
    """通道定向不可实现，或见证点与定向不符"""


class FreshLabelCollisionError(CausalSpeciesError):
    """新标签与已有标签冲突"""


class NotSymmetricError(CausalSpeciesError):
    """级数分量在新标签置换下不对称"""


class TruncationError(CausalSpeciesError):
    """截断阶数不足或不一致"""


class SeriesDivisionError(CausalSpeciesError):
    """级数除法要求常数项为 1"""


class NonRespectingConfigurationError(CausalSpeciesError):
    """装饰时间不满足所需的因果顺序"""


class UnknownDecorationError(CausalSpeciesError):
    """装饰符号未注册或特征标缺少取值"""


class MalformedVertexMapError(CausalSpeciesError):
    """顶点映射族不合法"""


class ParseError(CausalSpeciesError):
    """文本记号无法解析"""


class ScenarioError(CausalSpeciesError):
    """场景文件内容不合法"""
