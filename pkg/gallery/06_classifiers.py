"""
Environment tree and mood network
=================================

Both classifiers work on plain feature matrices, so they can be tried on
toy data before any audio is involved.
"""

import numpy as np

from audiolog.classify import MlpConfig, TreeConfig, evaluate, train_mlp, train_tree

###############################################################################
# The tree splits on gain ratio. It keeps splitting even when every
# candidate has zero gain, which is what XOR needs.

x = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
labels = ["indoor", "outdoor", "outdoor", "indoor"]
tree = train_tree(x, labels, TreeConfig(min_leaf=1))
print("depth", tree.depth(), "->", tree.predict(x))
print(tree.predict_one([0.9, 0.1]))

###############################################################################
# The network has logistic hidden layers and a softmax over the five moods.
# Each mood gets its own cluster in ten dimensions. The default topology
# (four hidden layers of 64, 64, 32 and 32 units) is used as is.

rng = np.random.default_rng(0)
moods = ["laugh", "sing", "cry", "arguing", "sigh"]
centres = 3 * rng.standard_normal((5, 10))
y = rng.integers(0, 5, 200)
rows = centres[y] + rng.standard_normal((200, 10))
names = [moods[i] for i in y]

net = train_mlp(rows[:150], names[:150], MlpConfig(epochs=200))
print(f"loss {net.history[0]:.3f} -> {net.history[-1]:.3f}")
print(evaluate(net, rows[150:], names[150:]).table())
