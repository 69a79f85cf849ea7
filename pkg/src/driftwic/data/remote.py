import asyncio
import io
import os
import zipfile

import aiohttp

from driftwic import logger
from driftwic.errors import DataError

WIC_URL = "https://pilehvar.github.io/wic/package/WiC_dataset.zip"


def fetch(url: str, method: str = "GET") -> bytes:
    """
    Performs a request and returns the raw response body
    Args:
        url: Address of the resource
        method: HTTP method
    Returns: The body of a 200 response
    """

    async def _fetch() -> bytes:
        async with aiohttp.ClientSession() as session:
            async with session.request(url=url, method=method) as response:
                if response.status != 200:
                    raise DataError("GET " + url + " answered " + str(response.status))
                return await response.read()

    return asyncio.run(_fetch())


def download_wic(dest_dir: str, url: str = WIC_URL) -> str:
    """
    Downloads the WiC archive and extracts it
    Args:
        dest_dir: Directory the archive is extracted into
        url: Archive location
    Returns: Path of the extracted training data file
    """
    os.makedirs(dest_dir, exist_ok=True)
    logger.info("Downloading " + url)
    payload = fetch(url)
    try:
        with zipfile.ZipFile(io.BytesIO(payload)) as archive:
            archive.extractall(dest_dir)
    except zipfile.BadZipFile:
        raise DataError(url + " did not return a zip archive")

    train_path = os.path.join(dest_dir, "train", "train.data.txt")
    if not os.path.exists(train_path):
        raise DataError("Archive from " + url + " has no train/train.data.txt")
    logger.info("WiC extracted to " + dest_dir)
    return train_path
