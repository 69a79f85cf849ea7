from driftwic.data.instance import PairInstance, CleaningReport
from driftwic.data.cleaning import TextCleaner, SpanMap, clean_text, validate_and_drop, prepare_split
from driftwic.data.canonical import load_canonical, save_canonical
from driftwic.data.wic import load_wic_augmentation
from driftwic.data.raw import load_tempowic_raw
from driftwic.data.synthetic import make_separable_dataset
