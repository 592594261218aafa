# encoding: utf-8
"""
Defines parameter sets used to set the behavior of pipeslack.

**New Parameters**:

To add a new parameter, let's call it `foo`, to any of the provided
parameter sets:

    - Add ``foo=None`` to the ``__init__`` method of the relevant
      parameter set and fill in its default, options, data type and
      description in the body of ``__init__``.

    - Add the keyword to the ``parkeys`` list of the ``from_dict``
      method.

    - If the value has constraints beyond its type and options, check
      them in ``validate``.
"""
import inspect
from collections import OrderedDict

from configobj import ConfigObj

from pipeslack.par.parset import ParSet
from pipeslack.par import util


class GenerationPar(ParSet):
    """
    Parameters of the discrete-time schedule generator.
    """
    def __init__(self, delta_us=None, granularity=None, steady=None, defer_w=None):

        # Grab the parameter names and values from the function
        # arguments
        args, _, _, values = inspect.getargvalues(inspect.currentframe())
        pars = OrderedDict([(k,values[k]) for k in args[1:]])

        defaults = OrderedDict.fromkeys(pars.keys())
        options = OrderedDict.fromkeys(pars.keys())
        dtypes = OrderedDict.fromkeys(pars.keys())
        descr = OrderedDict.fromkeys(pars.keys())

        defaults['delta_us'] = None
        dtypes['delta_us'] = int
        descr['delta_us'] = 'Generator step in microseconds.  If None, the step is the largest ' \
                            'operator duration divided by granularity.'

        defaults['granularity'] = 30
        dtypes['granularity'] = int
        descr['granularity'] = 'Number of steps per longest operator when delta_us is None.'

        defaults['steady'] = 'window'
        options['steady'] = GenerationPar.valid_steady()
        dtypes['steady'] = str
        descr['steady'] = 'Steady-phase policy after warm-up.  Options are: {0}'.format(
                            ', '.join(options['steady']))

        defaults['defer_w'] = False
        dtypes['defer_w'] = bool
        descr['defer_w'] = 'Run the W operators of a stage only after its forwards and ' \
                           'backwards.'

        super(GenerationPar, self).__init__(list(pars.keys()),
                                            values=list(pars.values()),
                                            defaults=list(defaults.values()),
                                            options=list(options.values()),
                                            dtypes=list(dtypes.values()),
                                            descr=list(descr.values()))
        self.validate()

    @classmethod
    def from_dict(cls, cfg):
        parkeys = ['delta_us', 'granularity', 'steady', 'defer_w']
        ParSet._check_keys(cls, cfg, parkeys)
        kwargs = {}
        for pk in parkeys:
            kwargs[pk] = cfg[pk] if pk in cfg.keys() else None
        return cls(**kwargs)

    @staticmethod
    def valid_steady():
        return ['window', 'greedy']

    def validate(self):
        if self.data['delta_us'] is not None and self.data['delta_us'] < 1:
            raise ValueError('delta_us must be at least 1 microsecond.')
        if self.data['granularity'] < 1:
            raise ValueError('granularity must be positive.')


class CommPar(ParSet):
    """
    Parameters of the communication model used for replays.
    """
    def __init__(self, model=None, queue_capacity=None):

        args, _, _, values = inspect.getargvalues(inspect.currentframe())
        pars = OrderedDict([(k,values[k]) for k in args[1:]])

        defaults = OrderedDict.fromkeys(pars.keys())
        options = OrderedDict.fromkeys(pars.keys())
        dtypes = OrderedDict.fromkeys(pars.keys())
        descr = OrderedDict.fromkeys(pars.keys())

        defaults['model'] = 'decoupled'
        options['model'] = CommPar.valid_models()
        dtypes['model'] = str
        descr['model'] = 'Transmission semantics.  Options are: {0}'.format(
                            ', '.join(options['model']))

        defaults['queue_capacity'] = 1
        dtypes['queue_capacity'] = int
        descr['queue_capacity'] = 'In-flight sends allowed per directed link for the ' \
                                  'sequential model.'

        super(CommPar, self).__init__(list(pars.keys()),
                                      values=list(pars.values()),
                                      defaults=list(defaults.values()),
                                      options=list(options.values()),
                                      dtypes=list(dtypes.values()),
                                      descr=list(descr.values()))
        self.validate()

    @classmethod
    def from_dict(cls, cfg):
        parkeys = ['model', 'queue_capacity']
        ParSet._check_keys(cls, cfg, parkeys)
        kwargs = {}
        for pk in parkeys:
            kwargs[pk] = cfg[pk] if pk in cfg.keys() else None
        return cls(**kwargs)

    @staticmethod
    def valid_models():
        return ['decoupled', 'sequential']

    def validate(self):
        if self.data['queue_capacity'] < 1:
            raise ValueError('queue_capacity must be at least 1.')


class SweepPar(ParSet):
    """
    Parameters of latency sweeps.
    """
    def __init__(self, n_process=None, plot=None):

        args, _, _, values = inspect.getargvalues(inspect.currentframe())
        pars = OrderedDict([(k,values[k]) for k in args[1:]])

        defaults = OrderedDict.fromkeys(pars.keys())
        dtypes = OrderedDict.fromkeys(pars.keys())
        descr = OrderedDict.fromkeys(pars.keys())

        defaults['n_process'] = 1
        dtypes['n_process'] = int
        descr['n_process'] = 'Number of worker processes used to replay the sweep grid.'

        defaults['plot'] = False
        dtypes['plot'] = bool
        descr['plot'] = 'Write a QA plot of delay and bubble rates next to the sweep table?'

        super(SweepPar, self).__init__(list(pars.keys()),
                                       values=list(pars.values()),
                                       defaults=list(defaults.values()),
                                       dtypes=list(dtypes.values()),
                                       descr=list(descr.values()))
        self.validate()

    @classmethod
    def from_dict(cls, cfg):
        parkeys = ['n_process', 'plot']
        ParSet._check_keys(cls, cfg, parkeys)
        kwargs = {}
        for pk in parkeys:
            kwargs[pk] = cfg[pk] if pk in cfg.keys() else None
        return cls(**kwargs)

    def validate(self):
        if self.data['n_process'] < 1:
            raise ValueError('n_process must be at least 1.')


class GanttPar(ParSet):
    """
    Style of the Gantt chart renderer.
    """
    def __init__(self, px_per_ms=None, lane_height=None, lane_gap=None, margin=None,
                 tick_ms=None, show_labels=None, color_f=None, color_b=None, color_w=None):

        args, _, _, values = inspect.getargvalues(inspect.currentframe())
        pars = OrderedDict([(k,values[k]) for k in args[1:]])

        defaults = OrderedDict.fromkeys(pars.keys())
        dtypes = OrderedDict.fromkeys(pars.keys())
        descr = OrderedDict.fromkeys(pars.keys())

        defaults['px_per_ms'] = 2.0
        dtypes['px_per_ms'] = [int, float]
        descr['px_per_ms'] = 'Horizontal scale in pixels per millisecond.'

        defaults['lane_height'] = 28
        dtypes['lane_height'] = int
        descr['lane_height'] = 'Height of a stage lane in pixels.'

        defaults['lane_gap'] = 8
        dtypes['lane_gap'] = int
        descr['lane_gap'] = 'Vertical gap between lanes in pixels.'

        defaults['margin'] = 60
        dtypes['margin'] = int
        descr['margin'] = 'Margin around the chart in pixels; holds lane labels and the axis.'

        defaults['tick_ms'] = 50
        dtypes['tick_ms'] = int
        descr['tick_ms'] = 'Spacing of the time-axis ticks in milliseconds.'

        defaults['show_labels'] = True
        dtypes['show_labels'] = bool
        descr['show_labels'] = 'Write the microbatch index inside each operator box?'

        defaults['color_f'] = 'steelblue'
        dtypes['color_f'] = str
        descr['color_f'] = 'Fill colour of forward operators.'

        defaults['color_b'] = 'seagreen'
        dtypes['color_b'] = str
        descr['color_b'] = 'Fill colour of backward-input operators.'

        defaults['color_w'] = 'darkorange'
        dtypes['color_w'] = str
        descr['color_w'] = 'Fill colour of backward-weight operators.'

        super(GanttPar, self).__init__(list(pars.keys()),
                                       values=list(pars.values()),
                                       defaults=list(defaults.values()),
                                       dtypes=list(dtypes.values()),
                                       descr=list(descr.values()))
        self.validate()

    @classmethod
    def from_dict(cls, cfg):
        parkeys = ['px_per_ms', 'lane_height', 'lane_gap', 'margin', 'tick_ms', 'show_labels',
                   'color_f', 'color_b', 'color_w']
        ParSet._check_keys(cls, cfg, parkeys)
        kwargs = {}
        for pk in parkeys:
            kwargs[pk] = cfg[pk] if pk in cfg.keys() else None
        return cls(**kwargs)

    def validate(self):
        if self.data['px_per_ms'] <= 0:
            raise ValueError('px_per_ms must be positive.')
        if self.data['tick_ms'] < 1:
            raise ValueError('tick_ms must be positive.')


class CampaignPar(ParSet):
    """
    Parameters of a multi-iteration straggler-trace campaign.

    ``restart_penalty_ms`` has no default: the cost of a
    checkpoint-and-restart must be stated by the user.
    """
    def __init__(self, total_iters=None, policy=None, restart_penalty_ms=None,
                 failure_fallback_ms=None, replan_lag_iters=None, queue_capacity=None,
                 mem_capacity=None, mem_per_activation=None, delta_us=None,
                 comm=None):

        args, _, _, values = inspect.getargvalues(inspect.currentframe())
        pars = OrderedDict([(k,values[k]) for k in args[1:]])

        defaults = OrderedDict.fromkeys(pars.keys())
        options = OrderedDict.fromkeys(pars.keys())
        dtypes = OrderedDict.fromkeys(pars.keys())
        descr = OrderedDict.fromkeys(pars.keys())

        defaults['total_iters'] = 1200
        dtypes['total_iters'] = int
        descr['total_iters'] = 'Number of training iterations to replay.'

        defaults['policy'] = 'adaptive'
        options['policy'] = CampaignPar.valid_policies()
        dtypes['policy'] = str
        descr['policy'] = 'Mitigation policy.  Options are: {0}'.format(
                            ', '.join(options['policy']))

        dtypes['restart_penalty_ms'] = [int, float]
        descr['restart_penalty_ms'] = 'Time charged once per link failure under the static ' \
                                      'policy (checkpoint and restart).  Required.'

        defaults['failure_fallback_ms'] = 0
        dtypes['failure_fallback_ms'] = [int, float]
        descr['failure_fallback_ms'] = 'Latency substituted for a failed link under the ' \
                                       'adaptive policy.'

        defaults['replan_lag_iters'] = 0
        dtypes['replan_lag_iters'] = int
        descr['replan_lag_iters'] = 'Iterations between a latency change and the installation ' \
                                    'of the new plan.'

        defaults['queue_capacity'] = 1
        dtypes['queue_capacity'] = int
        descr['queue_capacity'] = 'In-flight sends per directed link for sequential launch.'

        dtypes['mem_capacity'] = [int, float]
        descr['mem_capacity'] = 'Device memory used to size the initial plan.  If None, room ' \
                                'for 2S-1 activations is assumed.'

        defaults['mem_per_activation'] = 1
        dtypes['mem_per_activation'] = [int, float]
        descr['mem_per_activation'] = 'Memory held by one forward activation.'

        dtypes['delta_us'] = int
        descr['delta_us'] = 'Generator step in microseconds for every (re)generated schedule.'

        defaults['comm'] = 'sequential'
        options['comm'] = ['sequential', 'decoupled']
        dtypes['comm'] = str
        descr['comm'] = 'Replay model of both policies.  Options are: {0}'.format(
                            ', '.join(options['comm']))

        super(CampaignPar, self).__init__(list(pars.keys()),
                                          values=list(pars.values()),
                                          defaults=list(defaults.values()),
                                          options=list(options.values()),
                                          dtypes=list(dtypes.values()),
                                          descr=list(descr.values()))
        self.validate()

    @classmethod
    def from_dict(cls, cfg):
        parkeys = ['total_iters', 'policy', 'restart_penalty_ms', 'failure_fallback_ms',
                   'replan_lag_iters', 'queue_capacity', 'mem_capacity', 'mem_per_activation',
                   'delta_us', 'comm']
        ParSet._check_keys(cls, cfg, parkeys)
        kwargs = {}
        for pk in parkeys:
            kwargs[pk] = cfg[pk] if pk in cfg.keys() else None
        return cls(**kwargs)

    @staticmethod
    def valid_policies():
        return ['static', 'adaptive']

    def validate(self):
        self.validate_keys(can_be_None=['mem_capacity', 'delta_us'])
        if self.data['total_iters'] < 1:
            raise ValueError('total_iters must be positive.')
        if self.data['restart_penalty_ms'] < 0:
            raise ValueError('restart_penalty_ms must be non-negative.')
        if self.data['failure_fallback_ms'] < 0:
            raise ValueError('failure_fallback_ms must be non-negative.')
        if self.data['replan_lag_iters'] < 0:
            raise ValueError('replan_lag_iters must be non-negative.')
        if self.data['queue_capacity'] < 1:
            raise ValueError('queue_capacity must be at least 1.')
        if self.data['delta_us'] is not None and self.data['delta_us'] < 1:
            raise ValueError('delta_us must be at least 1 microsecond.')


class PipeSlackPar(ParSet):
    """
    The top-level parameter set of pipeslack.

    The set can be read from a configuration file, optionally merged
    with user files::

        par = PipeSlackPar.from_cfg_file(merge_with='my.cfg')

    and written back with::

        par.to_config('full.cfg')
    """
    def __init__(self, generation=None, comm=None, sweep=None, gantt=None):

        args, _, _, values = inspect.getargvalues(inspect.currentframe())
        pars = OrderedDict([(k,values[k]) for k in args[1:]])      # "1:" to skip 'self'

        defaults = OrderedDict.fromkeys(pars.keys())
        dtypes = OrderedDict.fromkeys(pars.keys())
        descr = OrderedDict.fromkeys(pars.keys())

        defaults['generation'] = GenerationPar()
        dtypes['generation'] = [ ParSet, dict ]
        descr['generation'] = 'Schedule generation.'

        defaults['comm'] = CommPar()
        dtypes['comm'] = [ ParSet, dict ]
        descr['comm'] = 'Communication model for replays.'

        defaults['sweep'] = SweepPar()
        dtypes['sweep'] = [ ParSet, dict ]
        descr['sweep'] = 'Latency sweeps.'

        defaults['gantt'] = GanttPar()
        dtypes['gantt'] = [ ParSet, dict ]
        descr['gantt'] = 'Gantt chart style.'

        super(PipeSlackPar, self).__init__(list(pars.keys()),
                                           values=list(pars.values()),
                                           defaults=list(defaults.values()),
                                           dtypes=list(dtypes.values()),
                                           descr=list(descr.values()))
        self.validate()

    @classmethod
    def from_cfg_file(cls, cfg_file=None, merge_with=None, evaluate=True):
        """
        Construct the parameter set using a configuration file.

        Note that::

            default = PipeSlackPar()
            nofile = PipeSlackPar.from_cfg_file()
            assert default.data == nofile.data, 'This should always pass.'

        Args:
            cfg_file (:obj:`str`, optional):
                A configuration file holding the full parameter set.
                If None, the defaults are used.
            merge_with (:obj:`str`, :obj:`list`, optional):
                One or more config files with modifications, merged in
                order over ``cfg_file`` (or the defaults).
            evaluate (:obj:`bool`, optional):
                Evaluate the string values read by configobj.

        Returns:
            :class:`PipeSlackPar`: The instance of the parameter set.
        """
        cfg = ConfigObj(PipeSlackPar().to_config() if cfg_file is None else cfg_file)

        _merge_with = [] if merge_with is None else \
                        ([merge_with] if isinstance(merge_with, str) else merge_with)
        for f in _merge_with:
            cfg.merge(ConfigObj(f))

        if evaluate:
            cfg = util.recursive_dict_evaluate(cfg)
        return cls.from_dict(cfg)

    @classmethod
    def from_cfg_lines(cls, cfg_lines=None, merge_with=None, evaluate=True):
        """
        Construct the parameter set from lines read, or made to look
        like they are read, from a configuration file.

        Args:
            cfg_lines (:obj:`list`, optional):
                Lines holding the full parameter set; defaults if None.
            merge_with (:obj:`list`, optional):
                Lines merged over ``cfg_lines``.
            evaluate (:obj:`bool`, optional):
                Evaluate the string values read by configobj.
        """
        cfg = ConfigObj(PipeSlackPar().to_config() if cfg_lines is None else cfg_lines)
        if merge_with is not None:
            cfg.merge(ConfigObj(merge_with))
        if evaluate:
            cfg = util.recursive_dict_evaluate(cfg)
        return cls.from_dict(cfg)

    @classmethod
    def from_dict(cls, cfg):
        allkeys = ['generation', 'comm', 'sweep', 'gantt']
        ParSet._check_keys(cls, cfg, allkeys)
        k = list(cfg.keys())

        kwargs = {}
        pk = 'generation'
        kwargs[pk] = GenerationPar.from_dict(cfg[pk]) if pk in k else None
        pk = 'comm'
        kwargs[pk] = CommPar.from_dict(cfg[pk]) if pk in k else None
        pk = 'sweep'
        kwargs[pk] = SweepPar.from_dict(cfg[pk]) if pk in k else None
        pk = 'gantt'
        kwargs[pk] = GanttPar.from_dict(cfg[pk]) if pk in k else None
        return cls(**kwargs)

    def validate(self):
        pass
