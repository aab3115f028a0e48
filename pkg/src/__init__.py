# counterfactual-drm
