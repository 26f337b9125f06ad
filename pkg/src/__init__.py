# Federated vs centralized forecasting simulator under detrending
