#!/usr/bin/env python
"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

"""

import gzip
import struct

import numpy as np
import pytest

from evotrain.data import (IDX_IMAGE_MAGIC, IDX_LABEL_MAGIC, RawImageSet, decode_raw, encode_idx, encode_raw,
    load_idx, load_raw, normalize, parse_idx, read_raw, split_train_val, stratified_quotas, subsample,
    synthetic_blobs, to_grayscale, write_idx, write_raw)
from evotrain.errors import (ChannelError, ConfigError, CountMismatch, DataError, FormatError, SizeError,
    TruncationError)
from evotrain.network import Dataset


def idx_images(pixels):
    pixels = np.asarray(pixels, dtype=np.uint8)
    return struct.pack('>I', IDX_IMAGE_MAGIC) + struct.pack('>3I', *pixels.shape) + pixels.tobytes()


def idx_labels(labels):
    labels = np.asarray(labels, dtype=np.uint8)
    return struct.pack('>II', IDX_LABEL_MAGIC, len(labels)) + labels.tobytes()


def write_pair(tmp_path, pixels, labels, suffix=""):
    images = tmp_path / f"images.idx{suffix}"
    label_file = tmp_path / f"labels.idx{suffix}"
    image_data, label_data = idx_images(pixels), idx_labels(labels)
    if suffix == ".gz":
        image_data, label_data = gzip.compress(image_data), gzip.compress(label_data)
    images.write_bytes(image_data)
    label_file.write_bytes(label_data)
    return images, label_file


def test_parse_idx_header():
    pixels = np.arange(12, dtype=np.uint8).reshape(3, 2, 2)
    data = idx_images(pixels)

    assert data[:4] == b"\x00\x00\x08\x03"
    assert np.array_equal(parse_idx(data, IDX_IMAGE_MAGIC), pixels)
    assert encode_idx(pixels) == data


@pytest.mark.parametrize("suffix", ["", ".gz"])
def test_load_idx(tmp_path, suffix):
    pixels = np.arange(24, dtype=np.uint8).reshape(3, 2, 4)
    images, labels = write_pair(tmp_path, pixels, [7, 0, 3], suffix)

    raw = load_idx(images, labels)

    assert raw.pixels.shape == (3, 2, 4, 1)
    assert raw.image_shape == (2, 4, 1)
    assert np.array_equal(raw.pixels[..., 0], pixels)
    assert raw.labels.tolist() == [7, 0, 3]


def test_idx_wrong_magic(tmp_path):
    images, labels = write_pair(tmp_path, np.zeros((2, 2, 2)), [0, 1])
    with pytest.raises(FormatError):
        load_idx(labels, images)


def test_idx_truncated():
    data = idx_images(np.ones((2, 3, 3)))
    with pytest.raises(TruncationError):
        parse_idx(data[:-1], IDX_IMAGE_MAGIC)
    with pytest.raises(TruncationError):
        parse_idx(data[:6], IDX_IMAGE_MAGIC)


def test_idx_count_mismatch(tmp_path):
    images, labels = write_pair(tmp_path, np.zeros((2, 2, 2)), [0, 1, 1])
    with pytest.raises(CountMismatch):
        load_idx(images, labels)


def test_idx_missing_file(tmp_path):
    with pytest.raises(DataError):
        load_idx(tmp_path / "nope.idx", tmp_path / "nope-labels.idx")


def test_write_idx(tmp_path):
    raw = RawImageSet(np.full((2, 3, 3, 1), 9), [1, 2])
    write_idx(raw, tmp_path / "img", tmp_path / "lbl")

    loaded = load_idx(tmp_path / "img", tmp_path / "lbl")
    assert np.array_equal(loaded.pixels, raw.pixels)
    assert np.array_equal(loaded.labels, raw.labels)

    with pytest.raises(ChannelError):
        write_idx(RawImageSet(np.zeros((1, 2, 2, 3)), [0]), tmp_path / "a", tmp_path / "b")


def test_raw_header():
    data = encode_raw(np.zeros((2, 3), dtype=np.uint8))
    assert data[:4] == b"EVT1"
    assert data[4:6] == bytes([0, 2])
    assert data[6:14] == struct.pack('>II', 2, 3)
    assert len(data) == 14 + 6


def test_raw_float_payload_big_endian():
    data = encode_raw(np.array([1.5]))
    assert data[4] == 1
    assert data[-8:] == struct.pack('>d', 1.5)
    decoded = decode_raw(data)
    assert decoded.dtype == np.float64
    assert decoded.tolist() == [1.5]


@pytest.mark.parametrize("data, error", [
    (b"EVT2" + bytes(6), FormatError),
    (b"EVT1" + bytes([7, 1]) + struct.pack('>I', 1) + bytes(1), FormatError),
    (b"EVT1" + bytes([0, 2]) + struct.pack('>I', 2), TruncationError),
    (b"EVT1" + bytes([0, 1]) + struct.pack('>I', 4) + bytes(3), TruncationError),
])
def test_raw_decode_errors(data, error):
    with pytest.raises(error):
        decode_raw(data)


def test_raw_encode_rejects_integers():
    with pytest.raises(FormatError):
        encode_raw(np.zeros(3, dtype=np.int32))


def test_load_raw_bytes(tmp_path):
    pixels = np.arange(2 * 2 * 2 * 3, dtype=np.uint8).reshape(2, 2, 2, 3)
    write_raw(pixels, tmp_path / "x.evt")
    write_raw(np.array([0, 1], dtype=np.uint8), tmp_path / "y.evt")

    raw = load_raw(tmp_path / "x.evt", tmp_path / "y.evt")

    assert isinstance(raw, RawImageSet)
    assert np.array_equal(raw.pixels, pixels)
    assert np.array_equal(read_raw(tmp_path / "x.evt"), pixels)


def test_load_raw_floats(tmp_path):
    inputs = np.random.default_rng(0).random((3, 4, 4, 1))
    write_raw(inputs, tmp_path / "x.evt")
    write_raw(np.array([0, 1, 1], dtype=np.uint8), tmp_path / "y.evt")

    dataset = load_raw(tmp_path / "x.evt", tmp_path / "y.evt", num_classes=2)

    assert isinstance(dataset, Dataset)
    assert np.array_equal(dataset.inputs, inputs)
    assert dataset.labels.tolist() == [0, 1, 1]


def test_load_raw_count_mismatch(tmp_path):
    write_raw(np.zeros((3, 2, 2, 1), dtype=np.uint8), tmp_path / "x.evt")
    write_raw(np.zeros(2, dtype=np.uint8), tmp_path / "y.evt")
    with pytest.raises(CountMismatch):
        load_raw(tmp_path / "x.evt", tmp_path / "y.evt")


@pytest.mark.parametrize("rgb, gray", [
    ((255, 0, 0), 76),
    ((0, 255, 0), 150),
    ((0, 0, 255), 29),
    ((10, 20, 30), 18),
    ((255, 255, 255), 255),
    ((0, 0, 0), 0),
])
def test_grayscale(rgb, gray):
    raw = RawImageSet(np.array(rgb, dtype=np.uint8).reshape(1, 1, 1, 3), [0])
    out = to_grayscale(raw)
    assert out.pixels.shape == (1, 1, 1, 1)
    assert int(out.pixels[0, 0, 0, 0]) == gray


def test_grayscale_needs_three_channels():
    with pytest.raises(ChannelError):
        to_grayscale(RawImageSet(np.zeros((1, 2, 2, 1)), [0]))


def test_normalize():
    raw = RawImageSet(np.array([0, 51, 255], dtype=np.uint8).reshape(1, 1, 3, 1), [4])
    dataset = normalize(raw, 5)

    assert dataset.inputs.dtype == np.float64
    assert dataset.inputs.ravel().tolist() == [0.0, 0.2, 1.0]
    assert dataset.num_classes == 5


def test_raw_image_set_validation():
    with pytest.raises(FormatError):
        RawImageSet(np.zeros((2, 2, 2)), [0, 1])
    with pytest.raises(CountMismatch):
        RawImageSet(np.zeros((2, 2, 2, 1)), [0])


def test_split_train_val():
    dataset = synthetic_blobs(2, 5, (4, 4))
    train, val = split_train_val(dataset, 0.8, seed=3)

    assert (len(train), len(val)) == (8, 2)
    again, _ = split_train_val(dataset, 0.8, seed=3)
    assert np.array_equal(train.inputs, again.inputs)

    with pytest.raises(ConfigError):
        split_train_val(dataset, 1.0)
    with pytest.raises(SizeError):
        split_train_val(dataset.take([0]), 0.5)


def test_stratified_quotas():
    labels = np.array([0] * 6 + [1] * 3 + [2])
    quotas = stratified_quotas(labels, 5)

    # 3, 1.5 and 0.5: the tie goes to the lower class
    assert quotas == {0: 3, 1: 2, 2: 0}
    assert sum(stratified_quotas(labels, 7).values()) == 7


def test_subsample_stratified():
    dataset = synthetic_blobs(4, 25, (4, 4), seed=1)
    small = subsample(dataset, 20, seed=2)

    assert len(small) == 20
    assert np.bincount(small.labels, minlength=4).tolist() == [5, 5, 5, 5]
    assert np.array_equal(small.inputs, subsample(dataset, 20, seed=2).inputs)


def test_subsample_keeps_order():
    raw = RawImageSet(np.arange(10, dtype=np.uint8).reshape(10, 1, 1, 1), [0, 1] * 5)
    picked = subsample(raw, 4, seed=0, stratified=False)

    values = picked.pixels.ravel().tolist()
    assert values == sorted(values)
    assert len(set(values)) == 4


@pytest.mark.parametrize("n", [0, 11])
def test_subsample_size(n):
    raw = RawImageSet(np.zeros((10, 1, 1, 1)), [0] * 10)
    with pytest.raises(SizeError):
        subsample(raw, n)


def test_synthetic_blobs():
    dataset = synthetic_blobs(3, 8, (6, 5), seed=4, channels=2, noise=0.05)

    assert dataset.inputs.shape == (24, 6, 5, 2)
    assert dataset.input_shape == (6, 5, 2)
    assert np.bincount(dataset.labels).tolist() == [8, 8, 8]
    assert dataset.inputs.min() >= 0.0 and dataset.inputs.max() <= 1.0
    assert np.array_equal(dataset.inputs, synthetic_blobs(3, 8, (6, 5), seed=4, channels=2, noise=0.05).inputs)
    assert not np.array_equal(dataset.inputs, synthetic_blobs(3, 8, (6, 5), seed=5, channels=2, noise=0.05).inputs)


def test_synthetic_blobs_rejects():
    with pytest.raises(ConfigError):
        synthetic_blobs(0, 8)
    with pytest.raises(ConfigError):
        synthetic_blobs(2, 8, (0, 4))
