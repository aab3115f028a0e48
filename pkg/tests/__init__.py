# Tests for counterfactual-drm
