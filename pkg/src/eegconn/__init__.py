"""EEG connectivity matrices, electrode seriation, and CNN-input tensors."""

from .connectivity import (ConnectivityMatrix, connectivity_matrix, pcc,
                           plv, te)
from .filterbank import (BandDefinition, BandedSegment, analytic_phase,
                         apply_filterbank, canonical_bank)
from .io import (EegRecording, Segment, TrialLabels, load_csv,
                 load_recording, save_recording, segment)
from .layout import CANONICAL_32, ElectrodeLayout, canonical_layout
from .metrics import (PAIR_SETS, PredictionRecord, ValencePairSet,
                      concentrativeness, error_report, mcnemar, spearman,
                      wilcoxon_one_sample)
from .ordering import (DisparityMatrix, ElectrodeOrder, UdsEmbedding,
                       apply_order, disparity, greedy_dist_order,
                       greedy_dist_restr_order, load_order,
                       mean_connectivity, order_from_connectivity,
                       save_order, uds_minimize, uds_stress)
from .synth import SynthSpec, synth_generate
from .tensor import (ConnectivityTensor, export_tensors, import_tensors,
                     stack_bands, write_manifest)

__version__ = "0.1.0"
