# -*- coding: utf-8 -*-
"""
A simple interface to be used.
"""

from typing import Dict
from sklearn.pipeline import Pipeline
from pybqe.enhancement.transformers import ColorSpaceTransformer, SequenceEnhancer
from pybqe.enhancement.validator import SequenceValidator
from pybqe.networks.model import BqeModel


def get_sequence_enhancement_pipeline(models: Dict[str, BqeModel], **kwargs) -> Pipeline:
    """
    A simple interface into the library for enhancing decoded RGB sequences with trained
    per-component models.

    :param models: the trained models keyed by component, `y`, `cb` and/or `cr`
    :param kwargs: patching and recolouring settings passed on to :class:`SequenceEnhancer`
    :return: an instantiated pipeline mapping a list of RGB frames to enhanced RGB frames
    """

    return Pipeline([
        ('validator', SequenceValidator(n_channels=3)),
        ('to_ycbcr', ColorSpaceTransformer("rgb_to_ycbcr")),
        ('enhancer', SequenceEnhancer(models=models, **kwargs)),
        ('to_rgb', ColorSpaceTransformer("ycbcr_to_rgb"))
    ])
