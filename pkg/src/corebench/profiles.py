"""Bidder profiles for the k-slot ad setting.

A profile holds the private values of text ads (one slot each) and image ads
(all k slots).  Profiles are canonicalized on construction: values are kept
sorted non-increasing, with ties broken by input position, and the input
position of every ad is retained so outcomes can be reported against the
caller's indexing.

Agents are addressed by a single global id: text ads occupy ids
``0 .. n_texts-1`` (in input order) and image ads ``n_texts .. n_texts+n_images-1``.

Values at ranks beyond the supplied lists read as zero, which implements the
usual "pad with zero-value bidders" convention (so the (k+1)-th text value and
the 2nd image value are always defined).
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError

__all__ = ["TextImageProfile"]


def _canonical(values: Sequence[float], kind: str) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise InputError(f"{kind} values must be a flat list, got shape {arr.shape}")
    if arr.size and (not np.all(np.isfinite(arr)) or np.any(arr < 0)):
        raise InputError(f"{kind} values must be finite and non-negative")
    # stable sort on negated values keeps input order among ties
    order = np.argsort(-arr, kind="stable")
    sorted_vals = arr[order]
    sorted_vals.setflags(write=False)
    order.setflags(write=False)
    return sorted_vals, order


class TextImageProfile:
    """Canonical valuation profile for k slots, text ads and image ads."""

    __slots__ = ("k", "text_values", "image_values", "text_order", "image_order")

    def __init__(self, k: int, texts: Sequence[float] = (), images: Sequence[float] = ()):
        if not isinstance(k, (int, np.integer)) or isinstance(k, bool) or k < 1:
            raise InputError(f"k must be a positive integer, got {k!r}")
        self.k = int(k)
        self.text_values, self.text_order = _canonical(texts, "text")
        self.image_values, self.image_order = _canonical(images, "image")

    # -- sizes ---------------------------------------------------------------

    @property
    def n_texts(self) -> int:
        return self.text_values.size

    @property
    def n_images(self) -> int:
        return self.image_values.size

    @property
    def n_agents(self) -> int:
        return self.n_texts + self.n_images

    # -- canonical-rank accessors (zero beyond the list) ----------------------

    def text_at(self, rank: int) -> float:
        """Value of the text ad at 0-based canonical rank; 0.0 past the end."""
        return float(self.text_values[rank]) if rank < self.n_texts else 0.0

    def image_at(self, rank: int) -> float:
        return float(self.image_values[rank]) if rank < self.n_images else 0.0

    def top_text_sum(self) -> float:
        """Total value of the k highest text ads (zero-padded)."""
        return float(self.text_values[: self.k].sum())

    # -- agent addressing ------------------------------------------------------

    def is_image_agent(self, agent: int) -> bool:
        if not 0 <= agent < self.n_agents:
            raise InputError(f"agent {agent} out of range (n={self.n_agents})")
        return agent >= self.n_texts

    def text_agent(self, rank: int) -> int:
        """Global agent id of the text ad at canonical rank."""
        return int(self.text_order[rank])

    def image_agent(self, rank: int) -> int:
        return self.n_texts + int(self.image_order[rank])

    def agent_value(self, agent: int) -> float:
        if self.is_image_agent(agent):
            pos = agent - self.n_texts
            rank = int(np.nonzero(self.image_order == pos)[0][0])
            return float(self.image_values[rank])
        rank = int(np.nonzero(self.text_order == agent)[0][0])
        return float(self.text_values[rank])

    def input_texts(self) -> np.ndarray:
        """Text values in the caller's original order."""
        out = np.empty(self.n_texts)
        out[self.text_order] = self.text_values
        return out

    def input_images(self) -> np.ndarray:
        out = np.empty(self.n_images)
        out[self.image_order] = self.image_values
        return out

    def with_agent_value(self, agent: int, value: float) -> "TextImageProfile":
        """New profile in which one agent reports ``value`` instead."""
        if not math.isfinite(value) or value < 0:
            raise InputError(f"replacement value must be finite and >= 0, got {value!r}")
        texts = self.input_texts()
        images = self.input_images()
        if self.is_image_agent(agent):
            images[agent - self.n_texts] = value
        else:
            texts[agent] = value
        return TextImageProfile(self.k, texts, images)

    # -- misc -------------------------------------------------------------------

    @property
    def all_zero(self) -> bool:
        return (self.n_texts == 0 or self.text_values[0] == 0.0) and (
            self.n_images == 0 or self.image_values[0] == 0.0
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TextImageProfile):
            return NotImplemented
        return (
            self.k == other.k
            and np.array_equal(self.input_texts(), other.input_texts())
            and np.array_equal(self.input_images(), other.input_images())
        )

    def __hash__(self) -> int:
        return hash((self.k, self.input_texts().tobytes(), self.input_images().tobytes()))

    def __repr__(self) -> str:
        return (
            f"TextImageProfile(k={self.k}, texts={self.input_texts().tolist()}, "
            f"images={self.input_images().tolist()})"
        )

    # -- wire format --------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "text": self.input_texts().tolist(),
            "image": self.input_images().tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TextImageProfile":
        if not isinstance(data, dict):
            raise InputError("profile JSON must be an object")
        for key in ("k", "text", "image"):
            if key not in data:
                raise InputError(f"profile JSON missing field {key!r}")
        if not isinstance(data["text"], Iterable) or isinstance(data["text"], (str, bytes)):
            raise InputError("field 'text' must be an array of numbers")
        if not isinstance(data["image"], Iterable) or isinstance(data["image"], (str, bytes)):
            raise InputError("field 'image' must be an array of numbers")
        return cls(data["k"], list(data["text"]), list(data["image"]))
