"""Unsupervised node-embedding trainers over estimated MDP graphs."""

from mdpembed.embeddings.app import app, context_distribution, sample_rooted_pairs
from mdpembed.embeddings.deepwalk import deepwalk
from mdpembed.embeddings.glae import bce_loss_and_grad, glae, normalized_adjacency
from mdpembed.embeddings.graphsage import (
    graphsage_unsup,
    mean_aggregate_matrix,
)
from mdpembed.embeddings.hope import hope, hope_reconstruction_error
from mdpembed.embeddings.nerd import alternating_walk, nerd
from mdpembed.embeddings.sgd import neg_sampling_batch, pair_embeddings_loss
from mdpembed.embeddings.tables import (
    EmbeddingTable,
    MatrixBaseline,
    input_dim,
    read_embedding,
    state_input,
    write_embedding,
)
from mdpembed.embeddings.walks import (
    DanglingNodeError,
    TrainSpec,
    WalkCorpus,
    pairs_per_walk,
    random_walks,
    window_pairs,
)

# trainer registry used by the CLI and the benchmark harness
METHODS = {
    "deepwalk": deepwalk,
    "app": app,
    "nerd": nerd,
    "hope": hope,
    "graphsage": graphsage_unsup,
    "glae": glae,
}
