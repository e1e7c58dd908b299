"""Exception types raised across the package."""


class KnowledgeGrowthError(Exception):
    pass


class NonSimplexProbabilities(KnowledgeGrowthError, ValueError):
    pass


class NonPositiveValue(KnowledgeGrowthError, ValueError):
    pass


class LengthMismatch(KnowledgeGrowthError, ValueError):
    pass


class NonPositiveAlpha(KnowledgeGrowthError, ValueError):
    pass


class StageOutOfOrder(KnowledgeGrowthError, ValueError):
    pass


class EmptySubset(KnowledgeGrowthError, ValueError):
    pass


class DomainError(KnowledgeGrowthError, ValueError):
    pass


class InstanceTooLarge(KnowledgeGrowthError, ValueError):
    pass


class DegenerateMaxEntropy(KnowledgeGrowthError, ValueError):
    """Order is undefined when only one packet type is active (max entropy 0)."""


class ConfigError(KnowledgeGrowthError, ValueError):
    pass
