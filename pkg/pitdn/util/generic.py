import logging

from colorama import Fore, Back, Style


def color_text(text, *colorama_args):
    return f"{''.join(colorama_args)}{text}{Style.RESET_ALL}"

def text_mod(text, *colorama_args, pad=0):
    return color_text(text.ljust(pad), *colorama_args)

def status_text(passed: bool | None, pad=0):
    '''
    PASS/FAIL/SKIP tag for check reports. ``None`` reads as skipped.
    '''
    if passed is None:
        return text_mod('SKIP', Fore.BLACK, Back.YELLOW, pad=pad)
    if passed:
        return text_mod('PASS', Fore.BLACK, Back.GREEN, pad=pad)
    return text_mod('FAIL', Fore.WHITE, Back.RED, pad=pad)

def log_report(logger: logging.Logger, title: str, lines: list[str], pad=60):
    '''
    Log a padded banner followed by report lines, one ``logger.info`` call per line.
    '''
    logger.info(text_mod(title, Style.BRIGHT, Fore.WHITE, Back.BLUE, pad=pad))
    for line in lines:
        logger.info(text_mod(line, pad=pad))
