from dotenv import load_dotenv, find_dotenv

load_dotenv(find_dotenv(usecwd=True))

from driftwic import logger  # noqa: E402  (log level is read from the environment)

__version__ = "0.1.0"
