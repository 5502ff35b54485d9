"""Configurable tree-graph decision environment.

A family of tree-structured POMDP benchmarks with closed-form episode
statistics: alternating wait and decision layers, sparse terminal rewards,
synthetic image observations with controllable observability, reference
policies, a tabular learning baseline, and multi-task curriculum
generation.
"""

from .agents import (
    QLearningParams,
    QLearnResult,
    act_navigation,
    act_optimal,
    act_random,
    final_mean_return,
    navigation_policy,
    optimal_policy,
    q_learn,
    random_policy,
    scripted_policy,
    write_learning_curve,
)
from .analytics import (
    GraphAnalytics,
    McResult,
    analyze_shape,
    episode_length_pmf,
    episode_length_support,
    expected_episode_steps,
    expected_search_episodes,
    format_analytics,
    length_chi_square,
    mc_estimate,
    min_episode_length,
    p_any_end,
    p_reward_navigation,
    p_reward_random,
    p_reward_random_series,
    validate_spec,
)
from .config import (
    GraphSpec,
    PRESET_NAMES,
    PRESETS,
    RewardSettings,
    load_config,
    parse_config,
    preset,
    spec_to_dict,
    write_config,
)
from .dynamics import (
    CtGraphEnv,
    EnvCursor,
    EnvModel,
    EpisodeTranscript,
    StepView,
    TranscriptRecord,
    build_model,
    format_transcripts_csv,
    reset,
    run_episode,
    step,
    write_transcripts_csv,
)
from .errors import (
    ConfigError,
    ContractError,
    CtGraphError,
    EpisodeDoneError,
    InvalidActionError,
)
from .observations import (
    ImageClass,
    Observation,
    ObservationConfig,
    build_image_set,
    class_for_state,
    one_hot,
    observation_shape,
    render,
    write_image_set,
)
from .rewards import (
    CurriculumTask,
    TaskSpec,
    draw_task,
    end_reward,
    gradient_match,
    gradient_reward,
    make_curriculum,
    needle_reward,
    stochastic_reward,
    task_from_spec,
    write_curriculum,
)
from .rng import RngStreams, STREAM_NAMES
from .topology import (
    GraphShape,
    StateId,
    StateKind,
    count_decision_states,
    count_end_states,
    count_states,
    count_wait_states,
    decode_state,
    encode_state,
    enumerate_states,
)

__version__ = "0.1.0"
