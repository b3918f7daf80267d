#!/usr/bin/env python3
"""
运行配置
优先使用环境变量（可写在 .env 文件中），没有则使用默认值
"""

import os
import sys
from contextlib import contextmanager
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Union

import orjson
from dotenv import load_dotenv
from loguru import logger
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from errors import BoundExceededError, ScenarioError

ENV_PREFIX = "CAUSAL_SPECIES_"


class Settings(BaseModel):
    """全局上界与随机种子"""
    composition_bound: int = Field(8, ge=0, le=10)   # 穷举组合时 |I| 的上界
    cell_bound: int = Field(6, ge=0, le=7)           # 枚举胞腔时 |I| 的上界
    series_bound: int = Field(6, ge=0, le=10)        # N_g、N_j、R_max 的上界
    default_truncation: int = Field(3, ge=0)
    witness_retries: int = Field(32, ge=1)
    seed: int = 0
    log_level: str = "WARNING"


def _read_env() -> Dict[str, str]:
    values = {}
    for name in Settings.model_fields:
        raw = os.getenv(ENV_PREFIX + name.upper())
        if raw is not None and raw.strip() != "":
            values[name] = raw.strip()
    return values


def load_settings(dotenv_path: Optional[str] = None) -> Settings:
    """从 .env 与环境变量加载配置"""
    load_dotenv(dotenv_path)
    values = _read_env()
    try:
        settings = Settings(**values)
    except ValidationError as e:
        raise ScenarioError(f"环境变量配置不合法: {e}") from e
    if values:
        logger.debug(f"从环境变量加载配置: {sorted(values)}")
    return settings


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """获取当前进程的配置"""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


@contextmanager
def override_settings(**changes) -> Iterator[Settings]:
    """临时覆盖配置项（命令行 --bound-override 与测试使用）"""
    global _settings
    previous = get_settings()
    try:
        updated = Settings.model_validate({**previous.model_dump(), **changes})
    except ValidationError as e:
        raise ScenarioError(f"配置覆盖不合法: {e}") from e
    _settings = updated
    try:
        yield _settings
    finally:
        _settings = previous


def check_bound(value: int, bound: int, what: str) -> None:
    if value > bound:
        raise BoundExceededError(f"{what}={value} 超出上界 {bound}")


def configure_logging(level: Optional[str] = None) -> None:
    """配置日志输出（只写 stderr，stdout 留给报告）"""
    logger.remove()
    logger.add(
        sys.stderr,
        level=(level or get_settings().log_level).upper(),
        format="{time:YYYY-MM-DD HH:mm:ss} - {level} - {message}",
    )


# =============================================================================
# 场景文件
# =============================================================================

class DecorationSpec(BaseModel):
    """场景中的一个装饰：符号、时间与特征标取值"""
    symbol: str = Field(min_length=1)
    time: Union[int, str] = 0
    character: Union[int, str] = 1
    label: Optional[Union[int, str]] = None

    @field_validator("time", "character")
    @classmethod
    def _rational(cls, value):
        try:
            Fraction(str(value))
        except ValueError as e:
            raise ValueError(f"不是有理数: {value!r}") from e
        return value

    def time_value(self) -> Fraction:
        return Fraction(str(self.time))


class ScenarioConfig(BaseModel):
    """命令行场景文件（JSON）"""
    n: int = Field(3, ge=0)
    n_g: int = Field(2, ge=0)
    n_j: int = Field(2, ge=0)
    seed: int = 0
    suites: List[str] = Field(default_factory=list)
    decorations: List[DecorationSpec] = Field(default_factory=list)
    interaction: DecorationSpec = Field(default_factory=lambda: DecorationSpec(symbol="S", time=0))
    observable: Optional[str] = None

    @model_validator(mode="after")
    def _check(self) -> "ScenarioConfig":
        settings = get_settings()
        check_bound(self.n, settings.composition_bound, "n")
        check_bound(self.n_g, settings.series_bound, "N_g")
        check_bound(self.n_j, settings.series_bound, "N_j")
        symbols = [d.symbol for d in self.decorations] + [self.interaction.symbol]
        if len(set(symbols)) != len(symbols):
            raise ValueError("装饰符号必须唯一")
        labels = [d.label for d in self.decorations if d.label is not None]
        if len(set(labels)) != len(labels):
            raise ValueError("装饰标签必须唯一")
        if self.observable is not None and self.observable not in symbols[:-1]:
            raise ValueError(f"可观测量 {self.observable} 未在 decorations 中声明")
        return self


def load_scenario(path: str) -> ScenarioConfig:
    """读取并校验场景文件"""
    try:
        with open(path, "rb") as f:
            raw = orjson.loads(f.read())
    except (OSError, orjson.JSONDecodeError) as e:
        raise ScenarioError(f"无法读取场景文件 {path}: {e}") from e
    try:
        scenario = ScenarioConfig.model_validate(raw)
    except ValidationError as e:
        raise ScenarioError(f"场景文件不合法: {e}") from e
    logger.debug(f"载入场景 {path}: {len(scenario.decorations)} 个装饰")
    return scenario


if __name__ == "__main__":
    print("⚙️  当前配置")
    print("=" * 60)
    for key, value in get_settings().model_dump().items():
        env_name = ENV_PREFIX + key.upper()
        source = "环境变量" if os.getenv(env_name) else "默认值"
        print(f"  {env_name:<36} = {value!s:<10} ({source})")
