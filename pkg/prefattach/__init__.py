from importlib.metadata import version

from prefattach.affit import AttachmentFunctionFit
from prefattach.affit import fit_af
from prefattach.affit import loglinearity_score
from prefattach.distfit import TailFit
from prefattach.distfit import fit_mle
from prefattach.distfit import select_kmin
from prefattach.ingest import CitationCorpus
from prefattach.ingest import read_corpus
from prefattach.netsim import ModelConfig
from prefattach.netsim import simulate
from prefattach.rate import AttachmentRateEstimate
from prefattach.rate import bin_rate
from prefattach.rate import jeong_rate
from prefattach.rate import newman_rate
from prefattach.timeline import GrowthSequence
from prefattach.timeline import Resolution
from prefattach.timeline import build_sequence


__all__ = [
    "AttachmentFunctionFit",
    "AttachmentRateEstimate",
    "CitationCorpus",
    "GrowthSequence",
    "ModelConfig",
    "Resolution",
    "TailFit",
    "bin_rate",
    "build_sequence",
    "fit_af",
    "fit_mle",
    "jeong_rate",
    "loglinearity_score",
    "newman_rate",
    "read_corpus",
    "select_kmin",
    "simulate",
]
__version__ = version(__name__)
