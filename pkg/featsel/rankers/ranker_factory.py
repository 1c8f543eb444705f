"""
Strateji etiketi → sıralayıcı sınıfı.
"""

from typing import Dict

from featsel.rankers.base_ranker import BaseRanker
from featsel.rankers.forest_importance import ForestImportanceRanker
from featsel.rankers.gbdt_importance import GbdtFrequencyRanker, GbdtGainRanker
from featsel.rankers.lasso import LassoRanker
from featsel.rankers.relief import ReliefRanker
from featsel.rankers.rfe import RfeRanker
from utils.exceptions import ConfigError


class RankerFactory:
    """Open/Closed: yeni stratejiler çalışma anında kaydedilebilir"""

    _RANKER_MAP: Dict[str, type] = {
        "RFE": RfeRanker,
        "LASSO": LassoRanker,
        "RF-IMP": ForestImportanceRanker,
        "XGB-GAIN": GbdtGainRanker,
        "GBDT-FREQ": GbdtFrequencyRanker,
        "RELIEFF": ReliefRanker,
    }

    @classmethod
    def create_ranker(cls, strategy: str, **kwargs) -> BaseRanker:
        key = strategy.upper()
        if key not in cls._RANKER_MAP:
            raise ConfigError(f"Bilinmeyen sıralama stratejisi: {strategy}")
        return cls._RANKER_MAP[key](**kwargs)

    @classmethod
    def get_supported_strategies(cls) -> list:
        return list(cls._RANKER_MAP)

    @classmethod
    def register_ranker(cls, strategy: str, ranker_class: type):
        cls._RANKER_MAP[strategy.upper()] = ranker_class
