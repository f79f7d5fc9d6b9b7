from sys import argv, exit

from dicnet.cli import main

if __name__ == '__main__':
    exit(main(argv[1:]))
