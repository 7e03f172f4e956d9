"""
Learning a template
===================

Train the template-t1 preset on text synthesised from one template and look
at what comes out of the beam for unseen inputs. The settings below are
small so the script finishes in under a minute; pass ``--full`` for the
preset's real size (about half an hour on one CPU).

Expect every output to follow the template while many carry the wrong
food, price or rating: sentence structure is learned long before the
decoder learns to copy attribute values from the input.
"""

import sys
import time
from collections import Counter

from d2tnlg.experiment import nbest_for_mrs, split_lexicon_inputs, train_template_model
from d2tnlg.rerank import score
from d2tnlg.templates import classify

full = "--full" in sys.argv
n_train = 2261 if full else 400
overrides = None if full else {"max_epochs": 6}

train_mrs, dev_mrs, test_mrs = split_lexicon_inputs(n_train, 50, 10, seed=1)
t = time.time()
tm = train_template_model(train_mrs, dev_mrs, "t1", "template-t1", seed=1, overrides=overrides,
                          progress=lambda r: print(f"epoch {r.epoch}  loss {r.train_loss:.3f}  "
                                                   f"dev ppl {r.dev_perplexity:.3f}  lr {r.learning_rate:g}"))
print(f"trained in {time.time() - t:.0f}s, best epoch {tm.result.best_epoch}")

blocks = nbest_for_mrs(tm, test_mrs, beam_size=5)
labels = Counter()
for mr, block in zip(test_mrs, blocks):
    lp, text = block[0]
    labels[classify(text).label.value] += 1
    print(f"{lp:8.3f}  errors={score(mr, text).total}  {text}")
print(dict(labels))
