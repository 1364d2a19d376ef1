# highest derivative order computed unless configured otherwise
DEFAULT_MAX_ORDER = 12

# jets are computed at least to this order so that low orders share one computation
MIN_JET_ORDER = 4
