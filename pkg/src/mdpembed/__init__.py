"""mdpembed: grid-world MDPs, graph embeddings of their state space, and a
DQN benchmark harness comparing embedding inputs against raw grid matrices."""

from mdpembed.gridworld import (
    Action,
    GridSpec,
    GridWorld,
    InvalidSpecError,
    StepOutcome,
    UnreachableGoalError,
    build_maze,
    builtin_maze_path,
    format_maze,
    load_maze,
    parse_maze,
    shortest_path_steps,
)
from mdpembed.mdpgraph import (
    MDPGraph,
    TransitionSample,
    build_graph,
    coverage,
    expected_samples_full_coverage,
    read_edgelist,
    sample_transitions,
    true_graph,
    undirected_view,
    write_edgelist,
)
from mdpembed.embeddings import (
    METHODS,
    EmbeddingTable,
    MatrixBaseline,
    TrainSpec,
    read_embedding,
    state_input,
    write_embedding,
)
from mdpembed.dqn import (
    AgentConfig,
    TrainingLog,
    greedy_policy_path,
    load_params,
    save_params,
    train_agent,
)
from mdpembed.harness import (
    FULL,
    AggregateCurve,
    ExperimentConfig,
    RunResult,
    aggregate,
    auc_per_seed,
    emit_csv,
    emit_plot,
    resolve_maze,
    run_experiment,
    sweep_dimension,
    sweep_samples,
)

__version__ = "0.1.0"
