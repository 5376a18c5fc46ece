TOOL_NAME = "lateralscan"
VERSION = "0.1.0"

NA = "NA"

TRACK_COLUMNS = ("index", "start", "end", "raw", "label")
SEGMENT_COLUMNS = ("start_nt", "end_nt", "n_windows", "mean_raw")
TRUTH_COLUMNS = ("acceptor_id", "donor_id", "insert_position", "insert_length")
LOSS_COLUMNS = ("epoch", "mean_loss")
