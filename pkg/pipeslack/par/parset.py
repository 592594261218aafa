# -*- coding: utf-8 -*-
"""
Define a utility base class used to hold parameters.

A :class:`ParSet` is a dictionary with a fixed set of keys whose values
are checked against allowed options and data types on assignment.
Nested parameter sets map onto nested sections of a configobj file.
"""
import os
import warnings
import textwrap

import numpy


class ParSet(object):
    """
    Generic base class to handle and manipulate a list of operational
    parameters.

    Args:
        pars (list):
            Keywords of the parameters.
        values (:obj:`list`, optional):
            Initial values; None entries fall back to ``defaults``.
        defaults (:obj:`list`, optional):
            Default values.
        options (:obj:`list`, optional):
            Allowed values for each parameter (None for unconstrained).
        dtypes (:obj:`list`, optional):
            Allowed types for each parameter (None for unconstrained).
        descr (:obj:`list`, optional):
            Parameter descriptions, written as comments in config
            output.
        cfg_section (:obj:`str`, optional):
            Section name used when writing this set to a config file.
        cfg_comment (:obj:`str`, optional):
            Comment written above that section.

    Raises:
        TypeError:
            Keys are not a list of strings.
        ValueError:
            Keys are not unique or an optional list has the wrong
            length.
    """
    def __init__(self, pars, values=None, defaults=None, options=None, dtypes=None,
                 descr=None, cfg_section=None, cfg_comment=None):
        if not isinstance(pars, list) or not all(isinstance(key, str) for key in pars):
            raise TypeError('Input parameter keys must be provided as a list of strings.')

        self.npar = len(pars)
        if len(set(pars)) != self.npar:
            raise ValueError('All input parameter keys must be unique.')

        for name, inp in zip(['Values', 'Defaults', 'Options', 'Data types', 'Descriptions'],
                             [values, defaults, options, dtypes, descr]):
            if inp is not None and (not isinstance(inp, list) or len(inp) != self.npar):
                raise ValueError('{0} must be a list with the same length as the keys '
                                 'list.'.format(name))

        _values = [None]*self.npar if values is None else values
        _defaults = [None]*self.npar if defaults is None else defaults
        _options = [None]*self.npar if options is None else options
        _dtypes = [None]*self.npar if dtypes is None else dtypes
        _descr = ['']*self.npar if descr is None else descr

        self.default = dict(zip(pars, _defaults))
        self.options = dict([ (p, [o]) if o is not None and not isinstance(o, list) else (p, o)
                              for p, o in zip(pars, _options) ])
        self.dtype = dict([ (p, [t]) if t is not None and not isinstance(t, list) else (p, t)
                            for p, t in zip(pars, _dtypes) ])
        self.descr = dict(zip(pars, _descr))

        # Assign through __setitem__ so every value is checked
        self.data = {}
        for p, d, v in zip(pars, _defaults, _values):
            self.__setitem__(p, d if v is None else v)

        self.cfg_section = cfg_section
        self.cfg_comment = cfg_comment

    def __getitem__(self, key):
        return self.data[key]

    def __setitem__(self, key, value):
        """
        Set the value for a key.

        Raises:
            ValueError: The value is not among the allowed options.
            TypeError: The value does not have an allowed data type.
        """
        if value is None:
            self.data[key] = value
            return

        if self.options[key] is not None:
            if isinstance(value, list):
                bad = [ v for v in value if v not in self.options[key] ]
                if len(bad) > 0:
                    raise ValueError('Input value for {0} invalid; {1} are not valid options.'
                                     '\nOptions are: {2}'.format(key, bad, self.options[key]))
            elif value not in self.options[key]:
                raise ValueError('Input value for {0} invalid: {1}.\nOptions are: {2}'.format(
                                                                    key, value, self.options[key]))
        if self.dtype[key] is not None and not any(isinstance(value, d) for d in self.dtype[key]):
            raise TypeError('Input value for {0} has incorrect type: {1}.'.format(key, value)
                            + '\nValid types are: {0}'.format(self.dtype[key]))

        self.data[key] = value

    def __len__(self):
        """Return the number of parameters."""
        return self.npar

    def __iter__(self):
        """Return an iterable to the parameter values."""
        return iter(self.data.values())

    def __repr__(self):
        return self._output_string(header=self.cfg_section)

    def keys(self):
        return list(self.data.keys())

    def _output_string(self, header=None):
        """
        Construct the table printed by :func:`__repr__`; nested sets are
        appended below their parent.
        """
        nested = []
        data_table = numpy.empty((self.npar+1, 4), dtype=object)
        data_table[0,:] = ['Parameter', 'Value', 'Default', 'Type']
        for i, k in enumerate(self.keys()):
            data_table[i+1,0] = k
            if isinstance(self.data[k], ParSet):
                _header = k if header is None else '{0}:{1}'.format(header, k)
                nested += [ self.data[k]._output_string(header=_header) ]
                data_table[i+1,1] = 'see below'
                data_table[i+1,2] = 'see below'
            else:
                data_table[i+1,1] = ParSet._data_string(self.data[k])
                data_table[i+1,2] = ParSet._data_string(self.default[k])
            data_table[i+1,3] = 'Undefined' if self.dtype[k] is None \
                                    else ', '.join([t.__name__ for t in self.dtype[k]])

        output = [ParSet._data_table_string(data_table)]
        if header is not None:
            output = [header] + output
        return '\n'.join(output + nested)

    @staticmethod
    def _data_table_string(data_table):
        """
        Format an array of strings with equally spaced columns, using
        the first row as the heading.
        """
        col_width = [ max(len(d) for d in col) for col in data_table.T ]
        rows = [ '  '.join(row[j].ljust(col_width[j]) for j in range(len(col_width)))
                 for row in data_table ]
        return '\n'.join([rows[0], '-'*len(rows[0])] + rows[1:]) + '\n'

    @staticmethod
    def _data_string(data):
        """
        Convert a single datum into a string; sequences become comma
        separated lists, which configobj reads back as lists.
        """
        if isinstance(data, str):
            return data
        if hasattr(data, '__len__'):
            return '[]' if len(data) == 0 else ', '.join([ ParSet._data_string(d) for d in data ])
        return data.__repr__()

    @staticmethod
    def _config_comment(comment, indent, full_width=72):
        head = indent + '# '
        lines = textwrap.wrap('{0}'.format(comment), full_width-len(head))
        return [ head + l for l in lines ]

    @staticmethod
    def config_lines(par, section_name=None, section_comment=None, section_level=0,
                     exclude_defaults=False, include_descr=True):
        """
        Recursively generate the lines of a configuration file for the
        provided ParSet.

        Args:
            par (:class:`ParSet`):
                Parameters to write.
            section_name (str):
                Name of the section.
            section_comment (:obj:`str`, optional):
                Comment placed above the section.
            section_level (:obj:`int`, optional):
                Nesting level; sets indentation and bracket count.
            exclude_defaults (:obj:`bool`, optional):
                Skip parameters equal to their default.
            include_descr (:obj:`bool`, optional):
                Write parameter descriptions as comments.

        Returns:
            list: Configuration file lines.
        """
        parset_keys = [ k for k in par.keys() if isinstance(par[k], ParSet) ]

        section_indent = ' '*4*section_level
        component_indent = section_indent + ' '*4
        lines = [] if section_comment is None \
                    else ParSet._config_comment(section_comment, section_indent)
        lines += [ section_indent + '['*(section_level+1) + section_name
                   + ']'*(section_level+1) ]
        min_lines = len(lines)

        for k in par.keys():
            if k in parset_keys or par[k] is None:
                continue
            if exclude_defaults and par[k] == par.default[k]:
                continue
            if include_descr and par.descr[k]:
                lines += ParSet._config_comment(par.descr[k], component_indent)
            lines += [ component_indent + k + ' = ' + ParSet._data_string(par[k]) ]

        for k in parset_keys:
            lines += ParSet.config_lines(par[k], section_name=k,
                                         section_comment=par.descr[k] if include_descr else None,
                                         section_level=section_level+1,
                                         exclude_defaults=exclude_defaults,
                                         include_descr=include_descr)
        return lines if len(lines) > min_lines else []

    def to_config(self, cfg_file=None, section_name=None, section_comment=None, section_level=0,
                  append=False, quiet=False, exclude_defaults=False, include_descr=True):
        """
        Write/Append the parameter set to a configuration file.

        Args:
            cfg_file (:obj:`str`, optional):
                File to write.  If None, the lines are returned instead;
                they can be handed directly to ``ConfigObj``.
            section_name (:obj:`str`, optional):
                Top-level section name; required when this set holds
                plain parameters and :attr:`cfg_section` is None.
            append (:obj:`bool`, optional):
                Append instead of overwriting.

        Raises:
            ValueError:
                No section name is available for a set of plain
                parameters.
        """
        if cfg_file is not None and os.path.isfile(cfg_file) and not append and not quiet:
            warnings.warn('Selected configuration file already exists and will be overwritten!')

        config_output = []
        if all(isinstance(d, ParSet) or d is None for d in self.data.values()):
            for k in self.keys():
                if self.data[k] is None:
                    continue
                config_output += ParSet.config_lines(
                                    self.data[k], section_name=k,
                                    section_comment=self.descr[k] if include_descr else None,
                                    section_level=section_level,
                                    exclude_defaults=exclude_defaults,
                                    include_descr=include_descr)
        else:
            if section_name is None and self.cfg_section is None:
                raise ValueError('No top-level section name available for configuration!')
            _section_name = self.cfg_section if section_name is None else section_name
            _section_comment = self.cfg_comment if section_comment is None else section_comment
            config_output += ParSet.config_lines(self, section_name=_section_name,
                                                 section_comment=_section_comment,
                                                 section_level=section_level,
                                                 exclude_defaults=exclude_defaults,
                                                 include_descr=include_descr)

        if cfg_file is None:
            return config_output

        with open(cfg_file, 'a' if append else 'w') as f:
            f.write('\n'.join(config_output) + '\n')

    def validate_keys(self, required=None, can_be_None=None):
        """
        Check that required keys are present and that only the keys in
        ``can_be_None`` are None.
        """
        if required is not None:
            missing = [ k for k in required if k not in self.keys() ]
            if len(missing) > 0:
                raise ValueError('Required keys were not defined: {0}'.format(missing))

        if can_be_None is not None:
            should_not_be_None = [ k for k in self.keys()
                                   if self.data[k] is None and k not in can_be_None ]
            if len(should_not_be_None) > 0:
                raise ValueError('These keys should not be None: {0}'.format(should_not_be_None))

    @staticmethod
    def _check_keys(cls, cfg, parkeys):
        """Reject keys of ``cfg`` that ``cls`` does not define."""
        badkeys = [ k for k in cfg.keys() if k not in parkeys ]
        if len(badkeys) > 0:
            raise ValueError('{0} not recognized key(s) for {1}.'.format(badkeys, cls.__name__))

    @classmethod
    def from_dict(cls, cfg):
        """
        Instantiate an unconstrained :class:`ParSet` from a dictionary.

        Derived classes override this so their options and data types
        are kept.
        """
        pars, values = map(lambda x : list(x), zip(*cfg.items()))
        return cls(pars, values=values)
