from enum import Enum


class Scheme(str, Enum):
    """Simulated waveforms."""

    WHTDM = "WHTDM"
    OFDM = "OFDM"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, value) -> "Scheme":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            raise ValueError(f"unknown scheme {value!r}; expected one of "
                             f"{[s.value for s in cls]}") from None
