from .app import create_app
from .store import (AuthError, ConflictError, NotFoundError, Project,
                    ProjectStore, Slot)

__all__ = ["create_app", "ProjectStore", "Project", "Slot",
           "AuthError", "ConflictError", "NotFoundError"]
