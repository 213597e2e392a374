import ovbound.cli

if __name__ == "__main__":
    ovbound.cli.main()
