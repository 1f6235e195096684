import logging
import logging.config
import os

import yaml

import configspace


SCRIPTDIR = os.path.dirname(__file__)

# Keys recognised at the top level of a configuration file
known_keys = ('dimensions', 'query', 'dataset', 'runs', 'exclude_queries',
              'include', 'exclude', 'storage_formats', 'partitions', 'extvp',
              'parse_mode', 'aggregator', 'top_k', 'bottom_h', 'coherence_mode',
              'global_filters', 'log_columns', 'debug', 'logging')

# Dimension roles used by the data preparator. A dimension plays a role if
# its (case folded) name is one of these.
role_names = {'schema':    ('schema', 'schemas'),
              'partition': ('partition', 'partitions', 'partitioning'),
              'storage':   ('storage', 'format', 'formats', 'storage_format'),
             }

# Schema option codes understood by the schema generator
schema_kinds = {'st': 'ST', 'vp': 'VP', 'wpt': 'WPT', 'extvp': 'ExtVP', 'pt': 'PT'}

# Partitioning option codes
partition_kinds = {'horizontal': 'HP', 'hp': 'HP',
                   'subject': 'SBP', 'sbp': 'SBP',
                   'predicate': 'PBP', 'pbp': 'PBP',
                  }

NATIVE_FORMATS = ('rows-csv', 'cols-bin')
LOG_COLUMNS = ('dataset', 'config', 'query', 'run', 'runtime_ms')

# global variables
config_files = [os.path.join(SCRIPTDIR, 'benchrank.yaml')]
configs_found = False
config = {}

class Error(Exception):
    """Base class for exceptions in this module."""
    pass

def load(path):
    global config_files
    if not os.path.isfile(path):
        raise Error('configuration file %s does not exist' % path)
    config_files = [path]
    reset()

def load_string(text):
    """Use the YAML document 'text' as the configuration (mostly for tests)."""
    global config
    global configs_found
    config = _parse(yaml.safe_load(text), '<string>')
    configs_found = ['<string>']

def reset():
    global config
    global configs_found

    config = {}
    configs_found = [f for f in config_files if os.path.isfile(f)]
    if not configs_found:
        logging.getLogger('pyBenchRank.config').warning(
            'configuration file %s does not exist, assuming default values',
            config_files[-1])
        return

    path = configs_found[-1]
    with open(path, encoding='utf-8') as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise Error('%s: %s' % (path, e))
    config = _parse(data, path)

def _parse(data, source):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise Error('%s: top level must be a mapping' % source)
    logger = logging.getLogger('pyBenchRank.config')
    for key in data:
        if key not in known_keys:
            logger.warning('%s: unknown key %r ignored', source, key)
    dims = data.get('dimensions')
    if dims is not None and not isinstance(dims, dict):
        raise Error('%s: dimensions must map names to option lists' % source)
    return data

def get(name, default=None):
    value = config.get(name)
    return default if value is None else value

def get_dataset():
    return str(get('dataset', 'dataset'))

def get_space():
    """The full configuration space declared under 'dimensions'."""
    try:
        return configspace.ConfigSpace.from_mapping(get('dimensions', {}))
    except configspace.Error as e:
        raise Error('dimensions: %s' % e)

def get_filtered_space():
    """The declared space after the include/exclude filters."""
    space = get_space()
    include = get('include', {})
    exclude = get('exclude', {})
    if not include and not exclude:
        return space
    try:
        return configspace.filter_space(space, include=include, exclude=exclude,
                                        declared=space)
    except configspace.Error as e:
        raise Error('include/exclude: %s' % e)

def get_queries():
    """
    Query ids of the workload. 'query' is either a count (ids Q1..Qn) or
    an explicit id list; ids named in 'exclude_queries' are dropped.
    """
    spec = get('query', [])
    if isinstance(spec, bool):
        raise Error('query must be a count or a list of ids')
    if isinstance(spec, int):
        if spec < 0:
            raise Error('query count must not be negative')
        ids = ['Q%d' % i for i in range(1, spec + 1)]
    elif isinstance(spec, (list, tuple)):
        ids = [str(q) for q in spec]
    else:
        raise Error('query must be a count or a list of ids')
    excluded = {str(q) for q in get_excluded_queries()}
    return [q for q in ids if q not in excluded]

def get_excluded_queries():
    return list(get('exclude_queries', []))

def get_runs():
    runs = int(get('runs', 5))
    if runs < 1:
        raise Error('runs must be at least 1')
    return runs

def get_partition_count():
    n = int(get('partitions', 4))
    if n < 1:
        raise Error('partitions must be at least 1')
    return n

def get_parse_mode():
    mode = str(get('parse_mode', 'lenient')).lower()
    if mode not in ('lenient', 'strict'):
        raise Error('parse_mode must be lenient or strict')
    return mode

def get_aggregator():
    agg = str(get('aggregator', 'mean')).lower()
    if agg not in ('mean', 'min', 'median'):
        raise Error('aggregator must be mean, min or median')
    return agg

def get_top_k():
    return int(get('top_k', 3))

def get_bottom_h():
    return int(get('bottom_h', 3))

def get_coherence_mode():
    mode = str(get('coherence_mode', 'pairwise')).lower()
    if mode not in ('pairwise', 'positional'):
        raise Error('coherence_mode must be pairwise or positional')
    return mode

def get_extvp():
    """(join kinds, selectivity threshold) for ExtVP generation."""
    extvp = get('extvp', {})
    kinds = tuple(str(k).upper() for k in extvp.get('join_kinds', ('SS', 'OS', 'SO')))
    threshold = float(extvp.get('selectivity', 1.0))
    return kinds, threshold

def get_global_filters():
    """Ordered {column title: {'include': ..., 'exclude': ...}} for global ranking."""
    filters = get('global_filters', {})
    if not isinstance(filters, dict):
        raise Error('global_filters must be a mapping')
    return filters

def get_log_columns():
    """Map canonical log column -> header name used in the log file."""
    mapping = dict(get('log_columns', {}))
    for key in mapping:
        if key not in LOG_COLUMNS:
            raise Error('log_columns: unknown column %r' % key)
    return {col: str(mapping.get(col, col)) for col in LOG_COLUMNS}

def get_role(space, role):
    """Name of the dimension of 'space' that plays 'role', or None."""
    for name in space.names:
        if name.lower() in role_names[role]:
            return name
    return None

def get_schema_kind(option):
    try:
        return schema_kinds[option.lower()]
    except KeyError:
        raise Error('unknown schema option %r' % option)

def get_partition_kind(option):
    try:
        return partition_kinds[option.lower()]
    except KeyError:
        raise Error('unknown partitioning option %r' % option)

def get_storage_format(option):
    """
    Native serializer for a storage option. Explicit 'storage_formats'
    entries win; otherwise csv and avro options are row oriented and
    everything else is columnar.
    """
    aliases = {str(k).lower(): str(v) for k, v in get('storage_formats', {}).items()}
    fmt = aliases.get(option.lower())
    if fmt is None:
        fmt = 'rows-csv' if option.lower() in ('csv', 'avro', 'rows-csv') else 'cols-bin'
    if fmt not in NATIVE_FORMATS:
        raise Error('storage_formats: %r is not one of %s' % (fmt, ', '.join(NATIVE_FORMATS)))
    return fmt

def getDebug():
    try:
        return bool(config.get('debug', False))
    except AttributeError:
        return False

def init_logging():
    settings = config.get('logging')
    if settings:
        settings = dict(settings)
        settings.setdefault('version', 1)
        logging.config.dictConfig(settings)
    elif getDebug():
        logging.basicConfig(level=logging.DEBUG)
    else:
        logging.basicConfig(level=logging.INFO)
