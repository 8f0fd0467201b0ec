class ClientError(Exception):
    """
    Base class for client session errors.
    """


class TransportError(ClientError):
    """
    Raised when the connection fails, closes or times out.
    """


class ProtocolError(ClientError):
    """
    Raised when the server sends something the protocol does not allow.
    """


class ServerError(ClientError):
    """
    Raised when the server answers a request with an Error frame.
    """

    def __init__(self, code, text):
        super().__init__(f"server error {code}: {text}")
        self.code = code
        self.text = text
