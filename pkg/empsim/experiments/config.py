# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
Loading and validation of experiment files.

An experiment file is a YAML document::

    name: sigma
    base:
      nodes: 100
      range: 250
    sweep:
      kind: sigma
      values: [3, 10, 20, 30, 40, 50]
    variants: [AODV, MP, EMP]
    hia: off
    seeds: [1, 2, 3]

Every section is optional. The parameters of a run are layered: the
built-in defaults of :class:`SimulationConfig
<empsim.simulation.config.SimulationConfig>`, then the preset, then the
``base`` section of the file, then the sweep value.
"""
from __future__ import annotations

from dataclasses import dataclass, fields
import logging
import numbers
from typing import Optional, Tuple

from django.conf import settings
import yaml

from empsim.core.geometry import ConfigurationError
from empsim.routing.config import Variant
from empsim.simulation.config import SimulationConfig

logger = logging.getLogger(__name__)

SWEEP_SIGMA = 'sigma'
SWEEP_VELOCITY = 'velocity'
SWEEP_TRAFFIC = 'traffic'
SWEEP_DENSITY = 'density'
SWEEP_KINDS = (SWEEP_SIGMA, SWEEP_VELOCITY, SWEEP_TRAFFIC, SWEEP_DENSITY)

#: The values swept over when a file names the kind only.
DEFAULT_SWEEP_VALUES = {
    SWEEP_SIGMA: (3.0, 10.0, 20.0, 30.0, 40.0, 50.0),
    SWEEP_VELOCITY: (1.0, 10.0, 20.0),
    SWEEP_TRAFFIC: (5, 10, 20, 30, 40),
    SWEEP_DENSITY: (75, 100, 150, 200),
}

#: Sweeps whose default values are a choice of ours rather than points of
#: the reference evaluation.
IMPLEMENTER_CHOICES = (SWEEP_TRAFFIC, SWEEP_DENSITY)

HIA_OFF = 'off'
HIA_ON = 'on'
HIA_BOTH = 'both'
HIA_MODES = {
    HIA_OFF: (False,),
    HIA_ON: (True,),
    HIA_BOTH: (False, True),
}

DEFAULT_VARIANTS = tuple(Variant)

TOP_LEVEL_KEYS = ('name', 'base', 'sweep', 'variants', 'hia', 'seeds')
SWEEP_KEYS = ('kind', 'values')

#: Names accepted in ``base`` for parameters stored under another name.
PARAMETER_ALIASES = {
    'range': 'r',
}

#: Parameters set per run rather than in ``base``.
RUN_PARAMETERS = ('variant', 'hia', 'seed')


class ConfigError(Exception):
    """
    Raised for an experiment file which cannot be read or which does not
    describe a valid experiment.
    """
    pass


def sweep_changes(kind, value):
    """
    The simulation parameters set by the sweep point ``value`` of a ``kind``
    sweep.
    """
    if kind == SWEEP_SIGMA:
        return {'sigma': float(value)}
    if kind == SWEEP_VELOCITY:
        return {'v_min': float(value), 'v_max': float(value)}
    if kind == SWEEP_TRAFFIC:
        return {'pairs': int(value)}
    if kind == SWEEP_DENSITY:
        return {'nodes': int(value)}
    raise ConfigError("sweep.kind: unknown sweep {!r}".format(kind))


def _is_number(value):
    return (isinstance(value, numbers.Real) and
            not isinstance(value, bool))


def _is_integer(value):
    return isinstance(value, numbers.Integral) and not isinstance(value, bool)


def _parameter_kinds():
    """
    Maps each parameter settable in ``base`` to a check of its YAML value,
    a description of what is expected and a conversion to the stored type,
    derived from the defaults.
    """
    kinds = {}
    for field in fields(SimulationConfig):
        if field.name in RUN_PARAMETERS:
            continue
        default = field.default
        if isinstance(default, bool):
            kinds[field.name] = (
                lambda v: isinstance(v, bool), "a boolean", bool)
        elif isinstance(default, int):
            kinds[field.name] = (_is_integer, "an integer", int)
        elif isinstance(default, float):
            kinds[field.name] = (_is_number, "a number", float)
        elif isinstance(default, str):
            kinds[field.name] = (
                lambda v: isinstance(v, str), "a string", str)
        else:
            kinds[field.name] = (
                _is_pair_list, "a list of pairs",
                lambda v: tuple(tuple(item) for item in v))
    return kinds


def _is_pair_list(value):
    return isinstance(value, list) and all(
        isinstance(item, (list, tuple)) and len(item) == 2 and
        all(_is_number(x) for x in item)
        for item in value)


@dataclass(frozen=True)
class ExperimentConfig(object):
    """
    A validated experiment: the parameters shared by all runs and the cross
    product of sweep values, variants, HIA modes and seeds to run.

    :ivar base: The parameters of every run before the sweep value, variant,
        HIA mode and seed are applied.
    :ivar defaulted_values: Whether ``sweep_values`` were not given in the
        file.
    """
    name: str = 'experiment'
    base: SimulationConfig = SimulationConfig()
    sweep: str = SWEEP_SIGMA
    sweep_values: Tuple = DEFAULT_SWEEP_VALUES[SWEEP_SIGMA]
    variants: Tuple[Variant, ...] = DEFAULT_VARIANTS
    hia: str = HIA_OFF
    seeds: Tuple[int, ...] = tuple(range(1, 11))
    preset: Optional[str] = None
    defaulted_values: bool = True

    @property
    def hia_modes(self):
        return HIA_MODES[self.hia]

    @property
    def run_count(self):
        return (len(self.sweep_values) * len(self.variants) *
                len(self.hia_modes) * len(self.seeds))

    @property
    def implementer_choice(self):
        """
        Whether the sweep points are default values not taken from the
        reference evaluation.
        """
        return self.defaulted_values and self.sweep in IMPLEMENTER_CHOICES

    def point_config(self, value):
        """
        The parameters at the sweep point ``value``, with the variant, HIA
        mode and seed of the base.
        """
        return self.base.with_changes(**sweep_changes(self.sweep, value))

    def run_config(self, value, variant, hia, seed):
        return self.point_config(value).with_changes(
            variant=variant, hia=hia, seed=seed)


class ExperimentConfigParser(object):
    """
    Turns the mapping read from an experiment file into an
    :class:`ExperimentConfig`.

    :param preset: The name of an entry of the ``EMPSIM_PRESETS`` setting
        to layer under the file's parameters.
    """
    def __init__(self, preset=None):
        self.preset = preset
        self.parameter_kinds = _parameter_kinds()

    def parse(self, data):
        """
        :raises ConfigError: Naming the first offending key.
        """
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigError(
                "The experiment file must hold a mapping of sections")
        self._check_keys(data, TOP_LEVEL_KEYS, '')

        preset = self._preset_parameters()
        preset_seeds = preset.pop('seeds', None)
        parameters = self._parameters(preset, 'preset {}'.format(self.preset))
        base_section = data.get('base') or {}
        if not isinstance(base_section, dict):
            raise ConfigError("base: must be a mapping of parameters")
        parameters.update(self._parameters(base_section, 'base'))
        try:
            base = SimulationConfig(**parameters)
        except ConfigurationError as e:
            raise ConfigError("base.{}".format(e))

        sweep, values, defaulted = self._sweep(data.get('sweep'))
        experiment = ExperimentConfig(
            name=self._name(data.get('name', 'experiment')),
            base=base,
            sweep=sweep,
            sweep_values=values,
            variants=self._variants(data.get('variants')),
            hia=self._hia(data.get('hia', HIA_OFF)),
            seeds=self._seeds(data.get('seeds', preset_seeds)),
            preset=self.preset,
            defaulted_values=defaulted)
        self._check_points(experiment)
        return experiment

    def _check_keys(self, mapping, allowed, section):
        for key in mapping:
            if key not in allowed:
                raise ConfigError("{section}{key}: unknown key".format(
                    section=section, key=key))

    def _preset_parameters(self):
        if self.preset is None:
            return {}
        presets = getattr(settings, 'EMPSIM_PRESETS', {})
        if self.preset not in presets:
            raise ConfigError("Unknown preset {!r}; known presets: {}".format(
                self.preset, ', '.join(sorted(presets)) or 'none'))
        return dict(presets[self.preset])

    def _parameters(self, section, name):
        parameters = {}
        for key, value in section.items():
            field = PARAMETER_ALIASES.get(key, key)
            if field not in self.parameter_kinds:
                raise ConfigError("{name}.{key}: unknown parameter".format(
                    name=name, key=key))
            check, expected, convert = self.parameter_kinds[field]
            if not check(value):
                raise ConfigError("{name}.{key}: must be {expected}".format(
                    name=name, key=key, expected=expected))
            parameters[field] = convert(value)
        return parameters

    def _name(self, name):
        if not isinstance(name, str) or not name.strip():
            raise ConfigError("name: must be a non-empty string")
        if '/' in name or name.startswith('.'):
            raise ConfigError("name: must be usable as a directory name")
        return name

    def _sweep(self, section):
        if section is None:
            section = {}
        if not isinstance(section, dict):
            raise ConfigError("sweep: must be a mapping with kind and values")
        self._check_keys(section, SWEEP_KEYS, 'sweep.')
        kind = section.get('kind', SWEEP_SIGMA)
        if kind not in SWEEP_KINDS:
            raise ConfigError("sweep.kind: must be one of {}".format(
                ', '.join(SWEEP_KINDS)))

        if 'values' not in section:
            return kind, DEFAULT_SWEEP_VALUES[kind], True
        values = section['values']
        if not isinstance(values, list) or not values:
            raise ConfigError("sweep.values: must be a non-empty list")
        integral = kind in (SWEEP_TRAFFIC, SWEEP_DENSITY)
        check = _is_integer if integral else _is_number
        if not all(check(value) for value in values):
            raise ConfigError("sweep.values: must all be {}".format(
                'integers' if integral else 'numbers'))
        if len(set(values)) != len(values):
            raise ConfigError("sweep.values: must be distinct")
        convert = int if integral else float
        return kind, tuple(convert(value) for value in values), False

    def _variants(self, variants):
        if variants is None:
            return DEFAULT_VARIANTS
        if isinstance(variants, str):
            variants = [variants]
        if not isinstance(variants, list) or not variants:
            raise ConfigError("variants: must be a non-empty list")
        parsed = []
        for name in variants:
            try:
                variant = Variant(str(name).upper().replace('-', '_'))
            except ValueError:
                raise ConfigError(
                    "variants: unknown variant {!r}; known variants: "
                    "{}".format(name, ', '.join(v.value for v in Variant)))
            if variant in parsed:
                raise ConfigError("variants: {} listed twice".format(variant))
            parsed.append(variant)
        return tuple(parsed)

    def _hia(self, hia):
        # YAML 1.1 reads the bare words on and off as booleans
        if hia is True:
            return HIA_ON
        if hia is False:
            return HIA_OFF
        if hia not in HIA_MODES:
            raise ConfigError("hia: must be one of on, off, both")
        return hia

    def _seeds(self, seeds):
        if seeds is None:
            seeds = getattr(settings, 'EMPSIM_DEFAULT_SEEDS', range(1, 11))
        if _is_integer(seeds):
            seeds = [seeds]
        seeds = list(seeds) if not isinstance(seeds, str) else None
        if not seeds:
            raise ConfigError("seeds: must be a non-empty list of integers")
        if not all(_is_integer(seed) and seed >= 0 for seed in seeds):
            raise ConfigError("seeds: must be non-negative integers")
        if len(set(seeds)) != len(seeds):
            raise ConfigError("seeds: must be distinct")
        return tuple(int(seed) for seed in seeds)

    def _check_points(self, experiment):
        for value in experiment.sweep_values:
            try:
                experiment.point_config(value)
            except ConfigurationError as e:
                raise ConfigError("sweep.values: at {value}: {error}".format(
                    value=value, error=e))


def parse_config(data, preset=None):
    """
    Builds an :class:`ExperimentConfig` out of the mapping ``data`` read
    from an experiment file.

    :raises ConfigError: If the mapping does not describe a valid experiment.
    """
    return ExperimentConfigParser(preset).parse(data)


def load_config(path, preset=None):
    """
    Reads and validates the experiment file at ``path``.

    :param preset: Name of the preset applied under the file's parameters.
    :raises ConfigError: If the file cannot be read, is not valid YAML or
        does not describe a valid experiment.
    """
    try:
        with open(path, 'r') as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise ConfigError("Cannot read {path}: {error}".format(
            path=path, error=e.strerror or e))
    except yaml.YAMLError as e:
        raise ConfigError("{path} is not valid YAML: {error}".format(
            path=path, error=e))
    experiment = parse_config(data, preset)
    logger.debug("Loaded experiment %s from %s (%d runs)",
                 experiment.name, path, experiment.run_count)
    return experiment


def resolved_parameters(config):
    """
    The parameters of a :class:`SimulationConfig
    <empsim.simulation.config.SimulationConfig>` as plain YAML-safe values.
    """
    resolved = {}
    for field in fields(config):
        value = getattr(config, field.name)
        if isinstance(value, Variant):
            value = value.value
        elif isinstance(value, tuple):
            value = [list(item) for item in value]
        resolved[field.name] = value
    return resolved
