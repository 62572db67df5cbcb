# Copyright 2026 The EMP Simulator Developers
# See the LICENSE file at the top-level directory of this distribution.
#
# This file is part of the EMP Simulator. It is subject to the license terms
# in the LICENSE file found in the top-level directory of this
# distribution. No part of the EMP Simulator, including this file, may be
# copied, modified, propagated, or distributed except according to the terms
# contained in the LICENSE file.
"""
A metaclass turning a class hierarchy into a registry of named plugins.
"""


class PluginRegistry(type):
    """
    A metaclass which any class that wants to behave as a registry can use.

    The root class using the metaclass gets an empty :attr:`plugins` list and
    every class derived from it is appended to that list when it is defined.
    A plugin is looked up by the value of its ``PLUGIN_NAME`` attribute using
    :meth:`get_plugin`. Classes leaving ``PLUGIN_NAME`` unset are abstract
    and never returned by a lookup.
    """
    def __init__(cls, name, bases, attrs):
        super(PluginRegistry, cls).__init__(name, bases, attrs)
        if not hasattr(cls, 'plugins'):
            cls.plugins = []
        else:
            cls.plugins.append(cls)

    def unregister_plugin(cls):
        cls.plugins.remove(cls)

    def get_plugin(cls, plugin_name):
        """
        Returns the registered subclass of ``cls`` whose ``PLUGIN_NAME``
        equals ``plugin_name``, or ``None``.
        """
        for plugin in cls.plugins:
            if (issubclass(plugin, cls) and
                    getattr(plugin, 'PLUGIN_NAME', None) == plugin_name):
                return plugin
        return None

    def plugin_names(cls):
        """
        The names of all concrete plugins derived from ``cls``, in definition
        order.
        """
        return [
            plugin.PLUGIN_NAME for plugin in cls.plugins
            if issubclass(plugin, cls) and getattr(plugin, 'PLUGIN_NAME', None)
        ]
