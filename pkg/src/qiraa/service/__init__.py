from .app import Predictor, create_app

__all__ = ["Predictor", "create_app"]
