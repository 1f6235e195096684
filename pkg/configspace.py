"""
Experimental dimensions, the configuration space they span and the
short dotted labels ('a.ii.3') used to name one configuration.

Label tokens depend on the position of the dimension:

    1st  lowercase letters      a, b, ..., z, aa, ab, ...
    2nd  lowercase roman        i, ii, ..., xx   (r1, r2, ... past 20 options)
    3rd  arabic numerals        1, 2, 3, ...
    4th  uppercase letters      A, B, ..., Z, AA, ...
    5th+ the same four alphabets again, prefixed with 'p<position>_'
"""

import itertools
import logging
import re
from dataclasses import dataclass

logger = logging.getLogger('pyBenchRank.configspace')

ROMAN_LIMIT = 20
LABEL_SEP = '.'

_ROMAN_VALUES = ((10, 'x'), (9, 'ix'), (5, 'v'), (4, 'iv'), (1, 'i'))


class Error(Exception):
    """Base class for exceptions in this module."""
    pass

class ConfigSpaceError(Error):
    pass

class LabelDecodeError(Error):
    pass


def _roman(n):
    out = []
    for value, numeral in _ROMAN_VALUES:
        while n >= value:
            out.append(numeral)
            n -= value
    return ''.join(out)

_ROMAN_LOOKUP = {_roman(n): n for n in range(1, ROMAN_LIMIT + 1)}

def _letters(n, upper=False):
    # bijective base 26: 1 -> a, 26 -> z, 27 -> aa
    base = ord('A') if upper else ord('a')
    out = []
    while n > 0:
        n, rem = divmod(n - 1, 26)
        out.append(chr(base + rem))
    return ''.join(reversed(out))

def _unletters(token, upper=False):
    pattern = r'[A-Z]+' if upper else r'[a-z]+'
    if not re.fullmatch(pattern, token):
        return None
    base = ord('A') if upper else ord('a')
    n = 0
    for ch in token:
        n = n * 26 + (ord(ch) - base + 1)
    return n


@dataclass(frozen=True)
class DimensionSpec:
    """One experimental dimension: a name and its ordered option codes."""
    name: str
    options: tuple

    def __post_init__(self):
        options = tuple(self.options)
        object.__setattr__(self, 'options', options)
        if not self.name:
            raise ConfigSpaceError('dimension without a name')
        if not options:
            raise ConfigSpaceError('dimension %r has no options' % self.name)
        if len(set(options)) != len(options):
            raise ConfigSpaceError('dimension %r has duplicate options' % self.name)

    def __len__(self):
        return len(self.options)

    def find(self, code):
        """
        Return the index of option 'code', or None. Exact matches win,
        otherwise a unique case-insensitive match is accepted.
        """
        if code in self.options:
            return self.options.index(code)
        folded = [i for i, opt in enumerate(self.options)
                  if str(opt).lower() == str(code).lower()]
        if len(folded) == 1:
            return folded[0]
        return None

    def resolve(self, code):
        i = self.find(code)
        if i is None:
            raise ConfigSpaceError('option %r is not part of dimension %r'
                                   % (code, self.name))
        return i


@dataclass(frozen=True)
class Configuration:
    """One point of a ConfigSpace, as one option index per dimension."""
    choices: tuple

    def __post_init__(self):
        object.__setattr__(self, 'choices', tuple(self.choices))


class ConfigSpace:
    """
    The Cartesian product of the options of an ordered list of dimensions.
    Instances are immutable.
    """

    def __init__(self, dimensions):
        dimensions = tuple(dimensions)
        if not dimensions:
            raise ConfigSpaceError('a configuration space needs at least one dimension')
        names = [d.name for d in dimensions]
        if len(set(names)) != len(names):
            raise ConfigSpaceError('duplicate dimension names: %s' % ', '.join(names))
        self._dimensions = dimensions

    @classmethod
    def from_mapping(cls, mapping):
        """
        Build a space from a {name: [options] | None} mapping, keeping the
        mapping order. Dimensions mapped to None are left out.
        """
        if not mapping:
            raise ConfigSpaceError('no dimensions declared')
        dims = []
        for name, options in mapping.items():
            if options is None:
                logger.debug('dimension %s omitted', name)
                continue
            if isinstance(options, (str, bytes)) or not hasattr(options, '__iter__'):
                raise ConfigSpaceError('options of dimension %r must be a list' % name)
            dims.append(DimensionSpec(str(name), tuple(str(o) for o in options)))
        return cls(dims)

    @property
    def dimensions(self):
        return self._dimensions

    @property
    def names(self):
        return tuple(d.name for d in self._dimensions)

    @property
    def size(self):
        size = 1
        for d in self._dimensions:
            size *= len(d)
        return size

    def __len__(self):
        return self.size

    def __eq__(self, other):
        return isinstance(other, ConfigSpace) and self._dimensions == other._dimensions

    def __hash__(self):
        return hash(self._dimensions)

    def __repr__(self):
        return 'ConfigSpace(%s)' % ' x '.join(
            '%s[%d]' % (d.name, len(d)) for d in self._dimensions)

    def position(self, name):
        """
        Index of dimension 'name'. A trailing 's' is ignored on either side
        so 'schema' finds a dimension declared as 'schemas'.
        """
        names = self.names
        if name in names:
            return names.index(name)
        stem = name.lower().rstrip('s')
        for i, n in enumerate(names):
            if n.lower().rstrip('s') == stem:
                return i
        raise ConfigSpaceError('no dimension named %r (have %s)'
                               % (name, ', '.join(names)))

    def has_dimension(self, name):
        try:
            self.position(name)
        except ConfigSpaceError:
            return False
        return True

    def dimension(self, name):
        return self._dimensions[self.position(name)]

    def validate(self, config):
        if len(config.choices) != len(self._dimensions):
            raise ConfigSpaceError('configuration %r has %d choices, space has %d dimensions'
                                   % (config.choices, len(config.choices),
                                      len(self._dimensions)))
        for idx, dim in zip(config.choices, self._dimensions):
            if not 0 <= idx < len(dim):
                raise ConfigSpaceError('choice %d out of range for dimension %r'
                                       % (idx, dim.name))

    def enumerate(self):
        return enumerate_space(self)

    def labels(self):
        return [encode_label(self, c) for c in enumerate_space(self)]

    def options_of(self, config):
        """Map dimension name -> option code for 'config'."""
        self.validate(config)
        return {d.name: d.options[i] for d, i in zip(self._dimensions, config.choices)}

    def option_of(self, config, name):
        pos = self.position(name)
        return self._dimensions[pos].options[config.choices[pos]]

    def configuration(self, **options):
        """Build a Configuration from option codes keyed by dimension name."""
        choices = []
        for dim in self._dimensions:
            if dim.name not in options:
                raise ConfigSpaceError('missing option for dimension %r' % dim.name)
            choices.append(dim.resolve(options[dim.name]))
        return Configuration(tuple(choices))


def enumerate_space(space):
    """
    Every configuration of 'space' exactly once, leftmost dimension
    slowest-varying.
    """
    ranges = [range(len(d)) for d in space.dimensions]
    return [Configuration(choices) for choices in itertools.product(*ranges)]


def _token(position, index, count):
    n = index + 1
    cycle, kind = divmod(position, 4)
    if kind == 0:
        token = _letters(n)
    elif kind == 1:
        token = _roman(n) if count <= ROMAN_LIMIT else 'r%d' % n
    elif kind == 2:
        token = str(n)
    else:
        token = _letters(n, upper=True)
    if cycle:
        token = 'p%d_%s' % (position + 1, token)
    return token

def _untoken(position, token, count):
    cycle, kind = divmod(position, 4)
    if cycle:
        prefix = 'p%d_' % (position + 1)
        if not token.startswith(prefix):
            return None
        token = token[len(prefix):]
    if kind == 0:
        return _unletters(token)
    if kind == 1:
        if count > ROMAN_LIMIT:
            m = re.fullmatch(r'r([1-9][0-9]*)', token)
            return int(m.group(1)) if m else None
        return _ROMAN_LOOKUP.get(token)
    if kind == 2:
        return int(token) if re.fullmatch(r'[1-9][0-9]*', token) else None
    return _unletters(token, upper=True)


def encode_label(space, config):
    space.validate(config)
    return LABEL_SEP.join(_token(pos, idx, len(dim))
                          for pos, (idx, dim)
                          in enumerate(zip(config.choices, space.dimensions)))

def decode_label(space, label):
    tokens = str(label).split(LABEL_SEP)
    if len(tokens) != len(space.dimensions):
        raise LabelDecodeError('label %r has %d tokens, expected %d'
                               % (label, len(tokens), len(space.dimensions)))
    choices = []
    for pos, (token, dim) in enumerate(zip(tokens, space.dimensions)):
        n = _untoken(pos, token, len(dim))
        if n is None or not 1 <= n <= len(dim):
            raise LabelDecodeError('token %r of label %r is out of range for dimension %r'
                                   % (token, label, dim.name))
        choices.append(n - 1)
    return Configuration(tuple(choices))


def _indexes(space, name, codes, declared):
    """
    Indexes of 'codes' in dimension 'name' of 'space'. Codes already
    filtered out of 'space' are skipped; with a 'declared' space, a code
    it never had is an error.
    """
    dim = space.dimension(name)
    found = set()
    for code in codes:
        i = dim.find(code)
        if i is not None:
            found.add(i)
        elif declared is not None:
            declared.dimension(name).resolve(code)
    return found

def filter_space(space, include=None, exclude=None, remove=(), declared=None):
    """
    Return a new space with reduced option lists.

    'include' and 'exclude' map dimension names to option lists; an
    'include' entry of None, or a name listed in 'remove', drops the
    whole dimension. Original option order is kept. Filtering twice with
    the same filters gives the same space.

    'declared' is the space 'space' was cut from; options unknown to it
    raise ConfigSpaceError.
    """
    include = dict(include or {})
    exclude = dict(exclude or {})
    removed = set()
    for name in remove:
        removed.add(space.position(name))
    for name, options in list(include.items()):
        if options is None:
            removed.add(space.position(name))
            del include[name]

    keep_sets = {}
    for name, options in include.items():
        keep_sets[space.position(name)] = _indexes(space, name, options, declared)
    drop_sets = {}
    for name, options in exclude.items():
        if options is None:
            continue
        drop_sets[space.position(name)] = _indexes(space, name, options, declared)

    dims = []
    for pos, dim in enumerate(space.dimensions):
        if pos in removed:
            continue
        kept = [opt for i, opt in enumerate(dim.options)
                if (pos not in keep_sets or i in keep_sets[pos])
                and i not in drop_sets.get(pos, ())]
        if not kept:
            raise ConfigSpaceError('filter leaves dimension %r without options' % dim.name)
        dims.append(DimensionSpec(dim.name, tuple(kept)))
    return ConfigSpace(dims)


def project(space, subspace, config):
    """
    Map a configuration of 'space' into 'subspace' (same dimension names,
    fewer options or dimensions). Returns None when the configuration is
    filtered out.
    """
    options = space.options_of(config)
    choices = []
    for dim in subspace.dimensions:
        opt = options[dim.name]
        if opt not in dim.options:
            return None
        choices.append(dim.options.index(opt))
    return Configuration(tuple(choices))

def lift(subspace, space, config):
    """
    Map a configuration of 'subspace' back into 'space', the space it was
    filtered from. Both must have the same dimensions.
    """
    if subspace.names != space.names:
        raise ConfigSpaceError('cannot lift from %r into %r' % (subspace, space))
    options = subspace.options_of(config)
    return Configuration(tuple(dim.resolve(options[dim.name]) for dim in space.dimensions))

def declared_label(subspace, space, config):
    """
    Label of a 'subspace' configuration in the space it was filtered
    from. A subspace with dimensions removed keeps its own labels.
    """
    if space is None or subspace.names != space.names:
        return encode_label(subspace, config)
    return encode_label(space, lift(subspace, space, config))
