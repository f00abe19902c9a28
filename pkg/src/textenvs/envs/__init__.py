from .mlc import MlcEnv, TERM_ACTION
from .qa import ANS_ACTION, CONT_ACTION, QAEnv
from .seqtag import SeqTagEnv

__all__ = ["SeqTagEnv", "QAEnv", "MlcEnv", "ANS_ACTION", "CONT_ACTION", "TERM_ACTION"]
