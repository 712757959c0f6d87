"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

Dataset ingestion: IDX files, the EVT1 raw tensor container, grayscale
conversion, splits and seeded synthetic data.

"""

import gzip
import logging
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ChannelError, ConfigError, CountMismatch, DataError, FormatError, SizeError, TruncationError
from .network import Dataset
from .record import atomic_write

log = logging.getLogger(__name__)

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801

RAW_MAGIC = b"EVT1"

# EVT1 dtype codes, payload big-endian
raw_dtypes = {
    0: np.dtype('u1'),
    1: np.dtype('>f8'),
}

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class RawImageSet:
    """Byte images [M, H, W, C] with byte labels."""
    pixels: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        pixels = np.asarray(self.pixels, dtype=np.uint8)
        labels = np.asarray(self.labels, dtype=np.uint8)
        if pixels.ndim != 4:
            raise FormatError(f"image tensor must be [M, H, W, C], got {list(pixels.shape)}")
        if labels.ndim != 1:
            raise FormatError(f"labels must be one-dimensional, got {list(labels.shape)}")
        if len(pixels) != len(labels):
            raise CountMismatch(f"{len(pixels)} images vs {len(labels)} labels")
        object.__setattr__(self, 'pixels', pixels)
        object.__setattr__(self, 'labels', labels)

    def __len__(self):
        return len(self.labels)

    @property
    def image_shape(self):
        return tuple(self.pixels.shape[1:])

    def take(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        return type(self)(self.pixels[indices], self.labels[indices])

    def __repr__(self):
        return f"{type(self).__name__}(M={len(self)}, shape={list(self.image_shape)})"


def _read_bytes(path):
    path = Path(path)
    try:
        if path.suffix == '.gz':
            with gzip.open(path, 'rb') as f:
                return f.read()
        return path.read_bytes()
    except FileNotFoundError:
        raise DataError(f"dataset file not found: {path}") from None
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None


def _take(data, offset, size, what):
    end = offset + size
    if len(data) < end:
        raise TruncationError(f"{what}: need {end} bytes, have {len(data)}")
    return data[offset:end]


def parse_idx(data, magic, what="IDX data"):
    """Decode an unsigned-byte IDX buffer whose magic must equal ``magic``."""
    (found,) = struct.unpack('>I', _take(data, 0, 4, what))
    if found != magic:
        raise FormatError(f"{what}: magic 0x{found:08x}, expected 0x{magic:08x}")
    ndim = magic & 0xff
    dims = struct.unpack(f'>{ndim}I', _take(data, 4, 4 * ndim, what))
    offset = 4 + 4 * ndim
    payload = _take(data, offset, math.prod(dims), what)
    return np.frombuffer(payload, dtype=np.uint8).reshape(dims).copy()


def encode_idx(array):
    array = np.asarray(array, dtype=np.uint8)
    header = struct.pack('>I', 0x0800 | array.ndim) + struct.pack(f'>{array.ndim}I', *array.shape)
    return header + array.tobytes()


def load_idx(image_path, label_path):
    images = parse_idx(_read_bytes(image_path), IDX_IMAGE_MAGIC, str(image_path))
    labels = parse_idx(_read_bytes(label_path), IDX_LABEL_MAGIC, str(label_path))
    if len(images) != len(labels):
        raise CountMismatch(f"{len(images)} images in {image_path} vs {len(labels)} labels in {label_path}")
    log.info("Loaded %d images of %dx%d from %s", len(images), images.shape[1], images.shape[2], image_path)
    return RawImageSet(images[..., np.newaxis], labels)


def write_idx(raw, image_path, label_path):
    if raw.pixels.shape[3] != 1:
        raise ChannelError(f"IDX images hold one channel, got {raw.pixels.shape[3]}")
    for path, array in ((image_path, raw.pixels[..., 0]), (label_path, raw.labels)):
        with atomic_write(path, 'wb') as f:
            f.write(encode_idx(array))


def encode_raw(array):
    array = np.asarray(array)
    if array.dtype == np.uint8:
        code = 0
    elif array.dtype.kind == 'f':
        code = 1
    else:
        raise FormatError(f"EVT1 holds u8 or f64 tensors, got {array.dtype}")
    dtype = raw_dtypes[code]
    header = RAW_MAGIC + struct.pack('>BB', code, array.ndim) + struct.pack(f'>{array.ndim}I', *array.shape)
    return header + np.ascontiguousarray(array, dtype=dtype).tobytes()


def decode_raw(data, what="EVT1 data"):
    if _take(data, 0, 4, what) != RAW_MAGIC:
        raise FormatError(f"{what}: missing EVT1 magic")
    code, ndim = struct.unpack('>BB', _take(data, 4, 2, what))
    if code not in raw_dtypes:
        raise FormatError(f"{what}: unknown dtype code {code}")
    dtype = raw_dtypes[code]
    dims = struct.unpack(f'>{ndim}I', _take(data, 6, 4 * ndim, what))
    offset = 6 + 4 * ndim
    payload = _take(data, offset, math.prod(dims) * dtype.itemsize, what)
    return np.frombuffer(payload, dtype=dtype).reshape(dims).astype(dtype.newbyteorder('='))


def read_raw(path):
    return decode_raw(_read_bytes(path), str(path))


def write_raw(array, path):
    with atomic_write(path, 'wb') as f:
        f.write(encode_raw(array))


def load_raw(image_path, label_path, num_classes=None):
    """Images and labels from two EVT1 files.

    Byte images are returned as a RawImageSet, float images (already scaled)
    as a Dataset.
    """
    images = read_raw(image_path)
    labels = read_raw(label_path)
    if len(images) != len(labels):
        raise CountMismatch(f"{len(images)} images vs {len(labels)} labels")
    if images.dtype == np.uint8:
        return RawImageSet(images, labels.astype(np.uint8))
    if images.ndim != 4:
        raise FormatError(f"image tensor must be [M, H, W, C], got {list(images.shape)}")
    return Dataset(images, labels.astype(np.int64), num_classes)


def to_grayscale(raw):
    if raw.pixels.shape[3] != 3:
        raise ChannelError(f"grayscale conversion needs 3 channels, got {raw.pixels.shape[3]}")
    luma = raw.pixels.astype(np.float64) @ LUMA_WEIGHTS
    gray = np.clip(np.floor(luma + 0.5), 0, 255).astype(np.uint8)
    return RawImageSet(gray[..., np.newaxis], raw.labels)


def normalize(raw, num_classes=None):
    return Dataset(raw.pixels.astype(np.float64) / 255.0, raw.labels.astype(np.int64), num_classes)


def split_train_val(dataset, fraction=0.8, seed=0):
    if not 0.0 < fraction < 1.0:
        raise ConfigError(f"split fraction must be in (0, 1), got {fraction}")
    order = np.random.default_rng(seed).permutation(len(dataset))
    cut = math.floor(fraction * len(dataset))
    if cut == 0 or cut == len(dataset):
        raise SizeError(f"cannot split {len(dataset)} examples at {fraction} into two non-empty parts")
    return dataset.take(order[:cut]), dataset.take(order[cut:])


def stratified_quotas(labels, n):
    """Per-class counts summing to ``n`` by largest remainder."""
    classes, counts = np.unique(labels, return_counts=True)
    exact = n * counts / counts.sum()
    quotas = np.floor(exact).astype(np.int64)
    short = n - int(quotas.sum())
    # largest fractional part first, lower class first on ties
    order = np.lexsort((classes, -(exact - quotas)))
    quotas[order[:short]] += 1
    return dict(zip(classes.tolist(), quotas.tolist()))


def subsample(dataset, n, seed=0, stratified=True):
    """Seeded subset of ``n`` examples, in original order."""
    if not 1 <= n <= len(dataset):
        raise SizeError(f"cannot draw {n} examples from {len(dataset)}")
    rng = np.random.default_rng(seed)
    labels = np.asarray(dataset.labels)
    if not stratified:
        picked = rng.choice(len(dataset), size=n, replace=False)
    else:
        picked = []
        for label, quota in stratified_quotas(labels, n).items():
            members = np.flatnonzero(labels == label)
            picked.append(rng.choice(members, size=quota, replace=False))
        picked = np.concatenate(picked)
    return dataset.take(np.sort(picked))


def blob_centers(num_classes, image_hw):
    h, w = image_hw
    grid = math.ceil(math.sqrt(num_classes))
    return [((k // grid + 0.5) * h / grid, (k % grid + 0.5) * w / grid) for k in range(num_classes)]


def synthetic_blobs(num_classes, per_class, image_hw=(16, 16), seed=0, channels=1, noise=0.1):
    """Gaussian blob per class on a fixed grid position, plus pixel noise."""
    if num_classes < 1 or per_class < 1 or min(image_hw) < 1 or channels < 1:
        raise ConfigError("synthetic dataset parameters must be positive")
    rng = np.random.default_rng(seed)
    h, w = image_hw
    grid = math.ceil(math.sqrt(num_classes))
    width = max(min(h, w) / (2 * grid), 1.0)
    yy, xx = np.mgrid[0:h, 0:w] + 0.5

    images = []
    for cy, cx in blob_centers(num_classes, image_hw):
        blob = np.exp(-((yy - cy)**2 + (xx - cx)**2) / (2 * width**2))
        images.append(np.broadcast_to(blob[..., np.newaxis], (h, w, channels)))

    labels = np.repeat(np.arange(num_classes), per_class)
    order = rng.permutation(len(labels))
    labels = labels[order]
    inputs = np.stack([images[k] for k in labels])
    inputs = np.clip(inputs + rng.normal(0.0, noise, inputs.shape), 0.0, 1.0)
    return Dataset(inputs, labels, num_classes)
