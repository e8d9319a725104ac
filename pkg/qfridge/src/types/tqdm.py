from tqdm import tqdm as _tqdm


class tqdm[T](_tqdm):
    """Bar that reports itself complete when closed early by a failing point."""

    def __init__(self, *args, **kwargs):
        kwargs.setdefault("dynamic_ncols", True)
        kwargs.setdefault("leave", False)
        super().__init__(*args, **kwargs)

    def close(self):
        if self.total is not None and self.n < self.total:
            self.total = self.n
        return super().close()
