from dataclasses import dataclass, field

MODES = ("none", "w2w", "p2p", "w2w+p2p")


@dataclass(frozen=True)
class EngineConfig:
    """Knobs shared by the parser, the prover and the aligner.

    ``mode`` selects which knowledge is injected while classifying:
    ``w2w`` enables on-the-fly word abduction from lexical relations,
    ``p2p`` enables forward chaining with stored axioms.  On-the-fly
    phrase abduction (axiom synthesis) is a separate switch because it
    only makes sense while extracting axioms from labelled pairs.
    """

    args: frozenset = field(default_factory=lambda: frozenset({"subj", "obj"}))
    mode: str = "w2w+p2p"
    phrase_abduction: bool = False
    max_branches: int = 256
    max_chain: int = 3
    max_depth: int = 32
    timeout_secs: float | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; choose from {MODES}")
        object.__setattr__(self, "args", frozenset(self.args))

    @property
    def word_abduction(self):
        return self.mode in ("w2w", "w2w+p2p")

    @property
    def stored_axioms(self):
        return self.mode in ("p2p", "w2w+p2p")

    def replace(self, **changes):
        from dataclasses import replace

        return replace(self, **changes)


DEFAULT_CONFIG = EngineConfig()
