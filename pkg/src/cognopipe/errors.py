"""Exception hierarchy shared by all pipeline stages.

Every hard error names the stage and operation that raised it plus the
offending entity, so the CLI can surface a single actionable line.
"""


class PipelineError(Exception):
    """Base class for hard errors raised by pipeline operations."""

    module = "cognopipe"

    def __init__(self, op: str, message: str):
        self.op = op
        self.message = message
        super().__init__(f"{self.module}.{op}: {message}")


class ConfigError(PipelineError):
    module = "config"


class ManifestError(PipelineError):
    module = "corpus"

    def __init__(self, op: str, message: str, diagnostics=()):
        self.diagnostics = list(diagnostics)
        super().__init__(op, message)


class AudioFormatError(PipelineError):
    module = "dsp"


class FeatureError(PipelineError):
    module = "acoustic"


class TextError(PipelineError):
    module = "linguistic"


class LeakageError(PipelineError):
    module = "linguistic"


class TrainingError(PipelineError):
    module = "classifiers"


class EvaluationError(PipelineError):
    module = "evaluation"


class SynthError(PipelineError):
    module = "synth"
