if __name__ == "__main__":
    from dynmix.cli import run as cli

    cli()
