import enum


class ResolutionKind(str, enum.Enum):
    MAXIMAL = "maximal"
    DAILY = "daily"
    MONTHLY = "monthly"
    YEARLY = "yearly"
    BI_EPOCHAL = "bi_epochal"
    COARSE = "coarse"


class Estimator(str, enum.Enum):
    JEONG = "jeong"
    NEWMAN_CORRECTED = "newman_corrected"
    NEWMAN_UNCORRECTED = "newman_uncorrected"


class Normalization(str, enum.Enum):
    PER_STEP = "per_step"
    GLOBAL = "global"


class KminCriterion(str, enum.Enum):
    KS = "ks"
    PLAUSIBLE = "plausible"


class GrowthMode(str, enum.Enum):
    PRICE = "price"
    JEONG = "jeong"
