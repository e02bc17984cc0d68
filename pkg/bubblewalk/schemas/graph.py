from pydantic import BaseModel


class BallRow(BaseModel):
    """One vertex of a ball, in address text form."""

    path: str
    pos: int
    dist_to_root: int
