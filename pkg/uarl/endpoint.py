import dataclasses
import ipaddress


@dataclasses.dataclass(frozen=True)
class Endpoint:
    """
    A TCP endpoint given as "host:port", with IPv6 hosts in brackets.
    """

    host: str
    port: int

    def __post_init__(self):
        if not self.host:
            raise ValueError("endpoint host must not be empty")
        if not 0 <= self.port <= 0xFFFF:
            raise ValueError(f"endpoint port {self.port} out of range")

    @classmethod
    def parse(cls, text):
        if isinstance(text, Endpoint):
            return text
        host, sep, port = text.strip().rpartition(":")
        if not sep or not host:
            raise ValueError(f"'{text}' is not of the form host:port")
        if host.startswith("[") and host.endswith("]"):
            host = host[1:-1]
        try:
            return cls(host, int(port))
        except ValueError:
            raise ValueError(f"'{text}' does not have a valid port")

    def __str__(self):
        try:
            is_ipv6 = ipaddress.ip_address(self.host).version == 6
        except ValueError:
            is_ipv6 = False
        return f"[{self.host}]:{self.port}" if is_ipv6 else f"{self.host}:{self.port}"
